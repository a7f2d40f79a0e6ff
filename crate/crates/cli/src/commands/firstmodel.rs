use super::{mean_and_error, z_score};
use crate::config::{Args, ExperimentConfig};
use crate::output::{Check, Run, Table};
use anyhow::Result;
use densmat::derive_seed;
use densmat::exact::{
    dirichlet_mean_sq_distance, page_entropy, spectral_mean_sq_distance, EnsembleParams,
};
use densmat::montecarlo::run_draws;
use densmat::sampling::{sample_density_matrix, sample_dirichlet};
use densmat::spectra::{density_spectrum, von_neumann_entropy};

/// For fixed n and each k: squared distance of the spectrum to the centre of
/// the simplex and von Neumann entropy, Monte Carlo against the exact values,
/// next to a Dirichlet(α = |k−n|+1) sample of the same dimension.
///
/// For k < n the nonzero spectrum of ρ has the law of the (k, n) ensemble, so
/// draws use `n_eff = min(n, k)` and `k_eff = max(n, k)`.
pub fn execute(args: &Args, mut config: ExperimentConfig) -> Result<Run> {
    let n = args.n.unwrap_or(2);
    let mut ks = match (&args.k_list, args.k) {
        (Some(list), _) => list.clone(),
        (None, Some(k)) => vec![k],
        (None, None) => vec![n],
    };
    ks.sort_unstable();
    ks.dedup();
    let samples = args.samples.unwrap_or(10_000);
    let max_z = config.threshold("zscore", args.threshold_zscore, 4.0);
    config.n = Some(n);
    config.k_list = Some(ks.clone());
    config.samples = Some(samples);
    let mut run = Run::new(config, &args.out)?;
    if samples < 2 {
        run.notice("fewer than two draws: z-score checks skipped");
    }

    let mut table = Table::new(
        "firstmodel",
        [
            "k",
            "n_eff",
            "alpha",
            "mc_sq_distance",
            "sq_distance_se",
            "exact_sq_distance",
            "dirichlet_mc",
            "dirichlet_se",
            "dirichlet_sq_distance",
            "mc_entropy",
            "entropy_se",
            "page_entropy",
            "log_n",
        ],
    );
    let mut distances = Vec::with_capacity(ks.len());
    for &k in &ks {
        let p = EnsembleParams::new(n.min(k), n.max(k))?;
        let (ne, ke) = (p.n(), p.k());
        let alpha = (ke - ne + 1) as f64;
        let seed = derive_seed(run.config.master_seed, &format!("firstmodel/{n}x{k}"));
        let draws = run_draws(seed, samples, run.config.workers, |_, rng| {
            let s = density_spectrum(&sample_density_matrix(ne, ke, rng)?)?;
            let centre = 1.0 / ne as f64;
            let dist: f64 = s.values().iter().map(|v| (v - centre).powi(2)).sum();
            let h = von_neumann_entropy(&s)?;
            let d = sample_dirichlet(ne, alpha, rng)?.sq_distance_to_center();
            Ok((dist, h, d))
        })?;
        let dist: Vec<f64> = draws.iter().map(|d| d.0).collect();
        let ent: Vec<f64> = draws.iter().map(|d| d.1).collect();
        let dir: Vec<f64> = draws.iter().map(|d| d.2).collect();
        let (dist_mean, dist_se) = mean_and_error(&dist);
        let (ent_mean, ent_se) = mean_and_error(&ent);
        let (dir_mean, dir_se) = mean_and_error(&dir);
        let exact_dist = spectral_mean_sq_distance(p)?;
        let exact_dir = dirichlet_mean_sq_distance(ne, alpha)?;
        let page = page_entropy(p)?;
        table.push(vec![
            k.into(),
            ne.into(),
            alpha.into(),
            dist_mean.into(),
            dist_se.into(),
            exact_dist.into(),
            dir_mean.into(),
            dir_se.into(),
            exact_dir.into(),
            ent_mean.into(),
            ent_se.into(),
            page.into(),
            (ne as f64).ln().into(),
        ]);
        if samples >= 2 {
            run.check(Check::below(
                format!("sq_distance_zscore_k{k}"),
                z_score(dist_mean, dist_se, exact_dist),
                max_z,
            ));
            run.check(Check::below(
                format!("dirichlet_zscore_k{k}"),
                z_score(dir_mean, dir_se, exact_dir),
                max_z,
            ));
            run.check(Check::below(
                format!("entropy_zscore_k{k}"),
                z_score(ent_mean, ent_se, page),
                max_z,
            ));
        }
        distances.push(dist_mean);
    }
    run.write(&table)?;
    if distances.len() >= 2 {
        let steepest = distances
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        run.check(Check::below("sq_distance_decreasing_in_k", steepest, 0.0));
    }
    Ok(run)
}
