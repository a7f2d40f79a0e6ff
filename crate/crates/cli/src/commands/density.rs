use crate::config::{resolve_k, Args, ExperimentConfig};
use crate::output::{Check, Run, Table};
use anyhow::{bail, Result};
use densmat::asymptotics::{chi_square_gof, uniform_edges};
use densmat::exact::{log_density_eigs, EnsembleParams};
use densmat::montecarlo::run_draws;
use densmat::quadrature::integrate;
use densmat::sampling::sample_density_matrix;
use densmat::spectra::density_spectrum;

const MIN_EXPECTED: f64 = 5.0;
const MASS_TOL: f64 = 1e-12;

/// Density of the unordered eigenvalues on the grid `i/G`, with a Monte Carlo
/// overlay.
///
/// n = 2: `density_curve` (λ₁, Φ), `density_histogram` of a uniformly chosen
/// eigenvalue per draw, chi-square p-value against the bin probabilities.
/// n = 3: `density_curve` over the triangle `λ₁ + λ₂ ≤ 1` and
/// `density_points`, the raw (λ₁, λ₂) of each draw in random order.
pub fn execute(args: &Args, mut config: ExperimentConfig) -> Result<Run> {
    let n = args.n.unwrap_or(2);
    if !(2..=3).contains(&n) {
        bail!("density supports n = 2 or n = 3, got n = {n}");
    }
    let k = resolve_k(args, n, n)?;
    if k < n {
        bail!("density needs k >= n (swap the dimensions), got n = {n}, k = {k}");
    }
    let grid = args.grid.unwrap_or(200);
    let samples = args.samples.unwrap_or(10_000);
    let bins = args.bins.unwrap_or(50);
    let max_mass_err = config.threshold("mass", args.threshold_mass, 1e-8);
    config.n = Some(n);
    config.k = Some(k);
    config.grid = Some(grid);
    config.samples = Some(samples);
    let p = EnsembleParams::new(n, k)?;
    if n == 2 {
        let min_p = config.threshold("pvalue", args.threshold_pvalue, 1e-3);
        config.bins = Some(bins);
        let mut run = Run::new(config, &args.out)?;
        two_level(&mut run, p, grid, samples, bins, max_mass_err, min_p)?;
        Ok(run)
    } else {
        let mut run = Run::new(config, &args.out)?;
        three_level(&mut run, p, grid, samples, max_mass_err)?;
        Ok(run)
    }
}

fn phi2(p: EnsembleParams, x: f64) -> f64 {
    log_density_eigs(p, &[x, 1.0 - x]).map_or(0.0, f64::exp)
}

fn phi3(p: EnsembleParams, x: f64, y: f64) -> f64 {
    log_density_eigs(p, &[x, y, (1.0 - x - y).max(0.0)]).map_or(0.0, f64::exp)
}

fn two_level(
    run: &mut Run,
    p: EnsembleParams,
    grid: usize,
    samples: usize,
    bins: usize,
    max_mass_err: f64,
    min_p: f64,
) -> Result<()> {
    let mut curve = Table::new("density_curve", ["lambda_1", "density"]);
    for i in 0..=grid {
        let x = i as f64 / grid as f64;
        curve.push(vec![x.into(), phi2(p, x).into()]);
    }
    run.write(&curve)?;
    let mass = integrate(|x| phi2(p, x), 0.0, 1.0, MASS_TOL, 0.0)?.value;
    run.check(Check::below("mass_error", (mass - 1.0).abs(), max_mass_err));

    let (n, k) = (p.n(), p.k());
    let picks = run_draws(
        run.config.master_seed,
        samples,
        run.config.workers,
        |_, rng| {
            let s = density_spectrum(&sample_density_matrix(n, k, rng)?)?;
            Ok(s.values()[rng.index(n)])
        },
    )?;
    let edges = uniform_edges(0.0, 1.0, bins);
    let mut counts = vec![0u64; bins];
    for &x in &picks {
        let bin = edges
            .partition_point(|&e| e <= x)
            .saturating_sub(1)
            .min(bins - 1);
        counts[bin] += 1;
    }
    let mut probs = Vec::with_capacity(bins);
    let mut hist = Table::new(
        "density_histogram",
        ["bin_lo", "bin_hi", "count", "mc_density", "theory_density"],
    );
    for b in 0..bins {
        let (lo, hi) = (edges[b], edges[b + 1]);
        let prob = integrate(|x| phi2(p, x), lo, hi, 1e-13, 1e-12)?.value;
        probs.push(prob);
        let width = hi - lo;
        hist.push(vec![
            lo.into(),
            hi.into(),
            counts[b].into(),
            (counts[b] as f64 / (samples as f64 * width)).into(),
            (prob / width).into(),
        ]);
    }
    run.write(&hist)?;
    match chi_square_gof(&counts, &probs, MIN_EXPECTED, min_p) {
        Ok(report) => run.check(Check::above(
            "chi_square_pvalue",
            report.p_value.unwrap_or(f64::NAN),
            min_p,
        )),
        Err(e) => run.notice(format!("chi-square test skipped: {e}")),
    }
    Ok(())
}

fn three_level(
    run: &mut Run,
    p: EnsembleParams,
    grid: usize,
    samples: usize,
    max_mass_err: f64,
) -> Result<()> {
    let g = grid;
    let phi = |i: usize, j: usize| {
        let x = [
            i as f64 / g as f64,
            j as f64 / g as f64,
            (g - i - j) as f64 / g as f64,
        ];
        log_density_eigs(p, &x).map_or(0.0, f64::exp)
    };
    let mut curve = Table::new("density_curve", ["lambda_1", "lambda_2", "density"]);
    for i in 0..=g {
        for j in 0..=g - i {
            curve.push(vec![
                (i as f64 / g as f64).into(),
                (j as f64 / g as f64).into(),
                phi(i, j).into(),
            ]);
        }
    }
    run.write(&curve)?;
    // Inner failures surface as NaN, which fails the check.
    let inner = |x: f64| {
        integrate(|y| phi3(p, x, y), 0.0, 1.0 - x, 0.1 * MASS_TOL, 0.0)
            .map_or(f64::NAN, |r| r.value)
    };
    let mass = integrate(inner, 0.0, 1.0, MASS_TOL, 0.0)?.value;
    run.check(Check::below("mass_error", (mass - 1.0).abs(), max_mass_err));

    let (n, k) = (p.n(), p.k());
    let points = run_draws(
        run.config.master_seed,
        samples,
        run.config.workers,
        |_, rng| {
            let s = density_spectrum(&sample_density_matrix(n, k, rng)?)?;
            let mut v = s.values().to_vec();
            for i in (1..v.len()).rev() {
                v.swap(i, rng.index(i + 1));
            }
            Ok((v[0], v[1]))
        },
    )?;
    let mut table = Table::new("density_points", ["draw", "lambda_1", "lambda_2"]);
    for (draw, (a, b)) in points.into_iter().enumerate() {
        table.push(vec![draw.into(), a.into(), b.into()]);
    }
    run.write(&table)?;
    Ok(())
}
