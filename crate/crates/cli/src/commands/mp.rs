use crate::config::{resolve_k, Args, ExperimentConfig};
use crate::output::{Check, Run, Table};
use anyhow::Result;
use densmat::asymptotics::{histogram, ks_distance, uniform_edges, MarchenkoPastur};
use densmat::exact::EnsembleParams;
use densmat::montecarlo::{median, run_draws};
use densmat::sampling::sample_density_matrix;
use densmat::spectra::{density_spectrum, empirical_measure};
use densmat::{derive_seed, Rescale};

/// For each size in `--n-list` (or `--n`), `--samples` draws of the
/// `c·n`-rescaled empirical spectral measure against `μ_c`, with `c = k/n`
/// realised per size.
///
/// Tables: `mp_ks` (per-draw KS distance and rescaled spectrum range),
/// `mp_histogram` (per-draw bin masses next to the `μ_c` masses, atom
/// included) and `mp_summary` (median KS per size). With several sizes the
/// median KS must decrease along increasing n.
pub fn execute(args: &Args, mut config: ExperimentConfig) -> Result<Run> {
    let mut sizes = match &args.n_list {
        Some(list) => list.clone(),
        None => vec![args.n.unwrap_or(200)],
    };
    sizes.sort_unstable();
    sizes.dedup();
    let dims: Vec<(usize, usize)> = sizes
        .iter()
        .map(|&n| Ok((n, resolve_k(args, n, n)?)))
        .collect::<Result<_>>()?;
    let samples = args.samples.unwrap_or(1);
    let bins = args.bins.unwrap_or(50);
    let max_ks = config.threshold("ks", args.threshold_ks, 0.05);
    if args.n_list.is_some() {
        config.n_list = Some(sizes.clone());
    } else {
        config.n = Some(sizes[0]);
        config.k = Some(dims[0].1);
    }
    config.c = args.c;
    config.samples = Some(samples);
    config.bins = Some(bins);
    let mut run = Run::new(config, &args.out)?;

    let mut ks_table = Table::new(
        "mp_ks",
        ["n", "k", "c", "draw", "ks", "min_rescaled", "max_rescaled"],
    );
    let mut hist_table = Table::new(
        "mp_histogram",
        [
            "n",
            "k",
            "draw",
            "bin_lo",
            "bin_hi",
            "empirical_mass",
            "mp_mass",
        ],
    );
    let mut summary = Table::new("mp_summary", ["n", "k", "c", "median_ks", "max_ks"]);
    let mut medians = Vec::new();
    for &(n, k) in &dims {
        let p = EnsembleParams::new(n, k)?;
        let law = MarchenkoPastur::for_params(p)?;
        let b = law.upper_edge();
        let edges = uniform_edges(-0.05 * b, 1.05 * b, bins);
        let cdf_at_edges: Vec<f64> = edges
            .iter()
            .map(|&e| law.cdf(e))
            .collect::<Result<_, _>>()?;
        let seed = derive_seed(run.config.master_seed, &format!("mp/{n}x{k}"));
        let draws = run_draws(seed, samples, run.config.workers, |_, rng| {
            let s = density_spectrum(&sample_density_matrix(n, k, rng)?)?;
            let emp = empirical_measure(&s, Rescale::DensityBulk)?;
            let ks = ks_distance(&emp, &law)?;
            let masses = histogram(&emp, &edges)?;
            let atoms = emp.atoms();
            Ok((ks, atoms[0].0, atoms[atoms.len() - 1].0, masses))
        })?;
        let mut ks_values = Vec::with_capacity(samples);
        for (draw, (ks, lo, hi, masses)) in draws.into_iter().enumerate() {
            ks_values.push(ks);
            ks_table.push(vec![
                n.into(),
                k.into(),
                p.c().into(),
                draw.into(),
                ks.into(),
                lo.into(),
                hi.into(),
            ]);
            for (i, m) in masses.into_iter().enumerate() {
                // The first bin straddles zero, so its MP mass includes the atom.
                let mp_mass = cdf_at_edges[i + 1] - if i == 0 { 0.0 } else { cdf_at_edges[i] };
                hist_table.push(vec![
                    n.into(),
                    k.into(),
                    draw.into(),
                    edges[i].into(),
                    edges[i + 1].into(),
                    m.into(),
                    mp_mass.into(),
                ]);
            }
        }
        let med = median(&ks_values)?;
        let worst = ks_values.iter().copied().fold(0.0, f64::max);
        summary.push(vec![
            n.into(),
            k.into(),
            p.c().into(),
            med.into(),
            worst.into(),
        ]);
        run.check(Check::below(format!("max_ks_n{n}_k{k}"), worst, max_ks));
        medians.push(med);
    }
    run.write(&ks_table)?;
    run.write(&hist_table)?;
    run.write(&summary)?;
    if medians.len() >= 2 {
        let steepest = medians
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        run.check(Check::below("median_ks_decreasing", steepest, 0.0));
    }
    Ok(run)
}
