use super::{mean_and_error, z_score};
use crate::config::{resolve_k, Args, ExperimentConfig};
use crate::output::{Check, Run, Table};
use anyhow::{bail, Result};
use densmat::exact::{moment_explicit, EnsembleParams, MAX_MOMENT_ORDER};
use densmat::montecarlo::run_draws;
use densmat::sampling::sample_density_matrix;
use densmat::spectra::density_spectrum;

/// Writes `sample_spectra` (draw, sorted eigenvalues) and `sample_summary`
/// (Monte Carlo mean of tr ρ^q against the exact value).
pub fn execute(args: &Args, mut config: ExperimentConfig) -> Result<Run> {
    let n = args.n.unwrap_or(2);
    let k = resolve_k(args, n, 2)?;
    let q_max = args.q_max.unwrap_or(4);
    if q_max > MAX_MOMENT_ORDER {
        bail!("--q-max {q_max} exceeds the supported maximum {MAX_MOMENT_ORDER}");
    }
    let samples = args.samples.unwrap_or(10_000);
    let max_z = config.threshold("zscore", args.threshold_zscore, 4.0);
    config.n = Some(n);
    config.k = Some(k);
    config.q_max = Some(q_max);
    config.samples = Some(samples);
    let params = EnsembleParams::new(n, k)?;
    let mut run = Run::new(config, &args.out)?;

    let spectra = run_draws(
        run.config.master_seed,
        samples,
        run.config.workers,
        |_, rng| density_spectrum(&sample_density_matrix(n, k, rng)?),
    )?;

    let mut table = Table::new(
        "sample_spectra",
        std::iter::once("draw".to_string()).chain((1..=n).map(|i| format!("lambda_{i}"))),
    );
    for (draw, s) in spectra.iter().enumerate() {
        let mut row = vec![draw.into()];
        row.extend(s.values().iter().map(|&v| v.into()));
        table.push(row);
    }
    run.write(&table)?;

    let mut summary = Table::new(
        "sample_summary",
        ["q", "mc_mean", "std_error", "exact", "z_score"],
    );
    if samples < 2 {
        run.notice("fewer than two draws: z-score checks skipped");
    }
    for q in 1..=q_max {
        let traces: Vec<f64> = spectra.iter().map(|s| s.power_sum(q as i32)).collect();
        let (mean, se) = mean_and_error(&traces);
        let exact = moment_explicit(params, q)?;
        let z = z_score(mean, se, exact);
        summary.push(vec![
            q.into(),
            mean.into(),
            se.into(),
            exact.into(),
            z.into(),
        ]);
        if samples >= 2 {
            run.check(Check::below(format!("moment_q{q}_zscore"), z, max_z));
        }
    }
    run.write(&summary)?;
    Ok(run)
}
