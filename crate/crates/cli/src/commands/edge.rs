use crate::config::{resolve_k, Args, ExperimentConfig};
use crate::output::{Check, Run, Table};
use anyhow::{bail, Context, Result};
use densmat::asymptotics::{edge_location, edge_rescale_density, ks_distance, TracyWidomTable};
use densmat::derive_seed;
use densmat::exact::EnsembleParams;
use densmat::montecarlo::{run_draws, Summary};
use densmat::sampling::sample_density_matrix;
use densmat::spectra::{density_spectrum, largest_eigenvalue, EmpiricalMeasure};

const MIN_SAMPLES: usize = 100;

/// Largest eigenvalue per draw for each size in `--n-list` (or `--n`).
///
/// The edge-location check applies to the largest size only: the finite-n
/// bias of `c·n·λ_max` is `O(n^{−2/3})`. Mean `t < 0` and the optional
/// Tracy–Widom KS are checked per size; sd stability between consecutive
/// sizes when there are several.
pub fn execute(args: &Args, mut config: ExperimentConfig) -> Result<Run> {
    let mut sizes = match &args.n_list {
        Some(list) => list.clone(),
        None => vec![args.n.unwrap_or(1000)],
    };
    sizes.sort_unstable();
    sizes.dedup();
    let dims: Vec<(usize, usize)> = sizes
        .iter()
        .map(|&n| Ok((n, resolve_k(args, n, n)?)))
        .collect::<Result<_>>()?;
    let samples = args.samples.unwrap_or(200);
    if samples < MIN_SAMPLES {
        bail!("edge needs at least {MIN_SAMPLES} draws, got {samples}");
    }
    let table = match &args.tw_table {
        Some(path) => Some(
            TracyWidomTable::from_path(path)
                .with_context(|| format!("reading Tracy-Widom table {}", path.display()))?,
        ),
        None => None,
    };
    let max_edge = config.threshold("edge", args.threshold_edge, 0.02);
    let max_ks = table
        .as_ref()
        .map(|_| config.threshold("ks", args.threshold_ks, 0.15));
    let max_sd = (sizes.len() >= 2).then(|| config.threshold("sd", args.threshold_sd, 0.25));
    if args.n_list.is_some() {
        config.n_list = Some(sizes.clone());
    } else {
        config.n = Some(sizes[0]);
        config.k = Some(dims[0].1);
    }
    config.c = args.c;
    config.samples = Some(samples);
    config.tw_table = args.tw_table.clone();
    let mut run = Run::new(config, &args.out)?;
    if table.is_none() {
        run.notice("no --tw-table supplied: Tracy-Widom KS section omitted");
    }

    let mut draws_table = Table::new(
        "edge_draws",
        ["n", "k", "draw", "lambda_max", "cn_lambda_max", "t"],
    );
    let mut summary = Table::new(
        "edge_summary",
        [
            "n",
            "k",
            "c",
            "edge",
            "mean_cn_lambda_max",
            "sd_cn_lambda_max",
            "mean_t",
            "sd_t",
            "ks_tw",
        ],
    );
    let mut sds = Vec::new();
    for (idx, &(n, k)) in dims.iter().enumerate() {
        let p = EnsembleParams::new(n, k)?;
        let c = p.c();
        let seed = derive_seed(run.config.master_seed, &format!("edge/{n}x{k}"));
        let lams = run_draws(seed, samples, run.config.workers, |_, rng| {
            Ok(largest_eigenvalue(&density_spectrum(
                &sample_density_matrix(n, k, rng)?,
            )?))
        })?;
        let scaled: Vec<f64> = lams.iter().map(|&l| c * n as f64 * l).collect();
        let ts: Vec<f64> = lams.iter().map(|&l| edge_rescale_density(l, p)).collect();
        for (draw, ((&l, &s), &t)) in lams.iter().zip(&scaled).zip(&ts).enumerate() {
            draws_table.push(vec![
                n.into(),
                k.into(),
                draw.into(),
                l.into(),
                s.into(),
                t.into(),
            ]);
        }
        let s_sum = Summary::from_values(&scaled)?;
        let t_sum = Summary::from_values(&ts)?;
        let edge = edge_location(c);
        let ks = match &table {
            Some(tw) => ks_distance(&EmpiricalMeasure::uniform(&ts)?, tw)?,
            None => f64::NAN,
        };
        summary.push(vec![
            n.into(),
            k.into(),
            c.into(),
            edge.into(),
            s_sum.mean.into(),
            s_sum.std_dev().into(),
            t_sum.mean.into(),
            t_sum.std_dev().into(),
            ks.into(),
        ]);
        if idx + 1 == dims.len() {
            let rel = (s_sum.mean - edge).abs() / edge;
            run.check(Check::below(
                format!("edge_location_n{n}_k{k}"),
                rel,
                max_edge,
            ));
        }
        run.check(Check::below(
            format!("mean_t_negative_n{n}_k{k}"),
            t_sum.mean,
            0.0,
        ));
        if let Some(limit) = max_ks {
            run.check(Check::below(format!("ks_tracy_widom_n{n}_k{k}"), ks, limit));
        }
        sds.push(t_sum.std_dev());
    }
    run.write(&draws_table)?;
    run.write(&summary)?;
    if let Some(limit) = max_sd {
        let worst = sds
            .windows(2)
            .map(|w| (w[0] - w[1]).abs() / w[1])
            .fold(0.0, f64::max);
        run.check(Check::below("sd_stability", worst, limit));
    }
    Ok(run)
}
