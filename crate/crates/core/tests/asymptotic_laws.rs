use densmat::asymptotics::{
    edge_rescale_density, edge_rescale_wishart, ks_distance, trace_clt_statistic, MarchenkoPastur,
    TracyWidomTable,
};
use densmat::exact::{moment_explicit, EnsembleParams};
use densmat::montecarlo::{pearson_correlation, run_draws, Summary};
use densmat::sampling::{
    induced_density, sample_density_matrix, sample_ginibre, wishart_from_factor,
};
use densmat::spectra::{
    density_spectrum, eigen_hermitian, empirical_measure, largest_eigenvalue, wishart_spectrum,
};
use densmat::{derive_seed, ComplexMatrix, Rescale, RngStream};
use num_complex::Complex64;
use std::path::PathBuf;

fn seed(label: &str) -> u64 {
    derive_seed(77_031, label)
}

fn shipped_table() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/tracy_widom_gue.txt")
}

#[test]
fn mp_moments_are_the_limit_of_exact_moments() {
    // ∫ x^q dL_n = (1/n) Σ (cnλ_i)^q, so E = (cn)^q E[tr ρ^q] / n = k^q E[tr ρ^q] / n.
    let n = 2000;
    for c in [1usize, 2] {
        let k = c * n;
        let law = MarchenkoPastur::new(c as f64).unwrap();
        let p = EnsembleParams::new(n, k).unwrap();
        for q in 1..=4 {
            let finite = (k as f64).powi(q as i32) * moment_explicit(p, q).unwrap() / n as f64;
            let limit = law.moment(q as u32).unwrap();
            assert!(
                (finite - limit).abs() / limit < 0.02,
                "c={c} q={q}: {finite} vs {limit}"
            );
        }
    }
}

#[test]
fn trace_clt_for_a_single_entry() {
    let p = EnsembleParams::new(1, 1).unwrap();
    let t = run_draws(seed("clt11"), 100_000, 1, |_, rng| {
        Ok(trace_clt_statistic(
            wishart_from_factor(&sample_ginibre(1, 1, rng)?).trace(),
            p,
        ))
    })
    .unwrap();
    let s = Summary::from_values(&t).unwrap();
    assert!(s.mean.abs() < 0.02, "mean {}", s.mean);
    assert!((s.variance - 1.0).abs() < 0.03, "variance {}", s.variance);
}

#[test]
fn trace_law_of_large_numbers() {
    let (n, k) = (100, 200);
    let ratios = run_draws(seed("lln"), 1000, 1, |_, rng| {
        let x = sample_ginibre(n, k, rng)?;
        Ok(x.frobenius_norm_sqr() / (n * k) as f64)
    })
    .unwrap();
    let s = Summary::from_values(&ratios).unwrap();
    assert!((s.mean - 1.0).abs() < 0.02, "mean S/nk = {}", s.mean);
    // Per draw S/nk has sd 1/√(nk); 5 sd bounds all 1000 draws with
    // probability 0.9994.
    let envelope = 5.0 / ((n * k) as f64).sqrt();
    assert!(ratios.iter().all(|r| (r - 1.0).abs() < envelope));
}

#[test]
fn normalised_spectrum_is_independent_of_the_trace() {
    let (n, k) = (5, 8);
    let pairs = run_draws(seed("indep"), 10_000, 1, |_, rng| {
        let w = wishart_from_factor(&sample_ginibre(n, k, rng)?);
        Ok((w.trace(), induced_density(&w)?.purity()))
    })
    .unwrap();
    let (s, p): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let r = pearson_correlation(&s, &p).unwrap();
    assert!(r.abs() < 0.03, "corr = {r}");
}

#[test]
fn eigensolver_residual_on_random_hermitian_matrices() {
    for n in [1, 7, 200, 2000] {
        let mut rng = RngStream::new(seed("residual"), n as u64);
        let a = sample_ginibre(n, n, &mut rng).unwrap();
        let m = ComplexMatrix::from_fn(n, n, |i, j| {
            let (x, y) = (a.get(i, j), a.get(j, i).conj());
            if i == j {
                Complex64::new(x.re, 0.0)
            } else {
                (x + y) * 0.5
            }
        })
        .unwrap();
        let e = eigen_hermitian(&m).unwrap();
        let residual = e.reconstruction_residual(&m).unwrap();
        assert!(
            residual <= 1e-10 * m.frobenius_norm().max(1.0),
            "n={n}: residual {residual:e}"
        );
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn empirical_measure_with_zero_atom_matches_mp() {
    // k < n: half of the spectrum is exactly zero, matching the MP atom.
    let (n, k) = (400, 200);
    let mut rng = RngStream::new(seed("atom"), 0);
    let s = density_spectrum(&sample_density_matrix(n, k, &mut rng).unwrap()).unwrap();
    assert_eq!(s.values().iter().filter(|v| **v == 0.0).count(), n - k);
    let emp = empirical_measure(&s, Rescale::DensityBulk).unwrap();
    let law = MarchenkoPastur::for_params(EnsembleParams::new(n, k).unwrap()).unwrap();
    let d = ks_distance(&emp, &law).unwrap();
    assert!(d < 0.05, "KS = {d}");
}

#[test]
fn largest_eigenvalue_sits_at_the_edge() {
    let (n, k) = (1000, 1000);
    let maxima = run_draws(seed("edge"), 20, 1, |_, rng| {
        let s = density_spectrum(&sample_density_matrix(n, k, rng)?)?;
        Ok(k as f64 * largest_eigenvalue(&s))
    })
    .unwrap();
    let mean = Summary::from_values(&maxima).unwrap().mean;
    assert!((mean - 4.0).abs() / 4.0 < 0.02, "mean c n λ_max = {mean}");
}

#[test]
fn wishart_and_density_edge_statistics_converge() {
    let rms_gap = |n: usize| {
        let p = EnsembleParams::new(n, n).unwrap();
        let gaps = run_draws(seed("gap"), 100, 1, |_, rng| {
            let w = wishart_from_factor(&sample_ginibre(n, n, rng)?);
            let top = largest_eigenvalue(&wishart_spectrum(&w)?);
            let td = edge_rescale_density(top / w.trace(), p);
            let tw = edge_rescale_wishart(top, p);
            Ok((td - tw) * (td - tw))
        })
        .unwrap();
        (gaps.iter().sum::<f64>() / gaps.len() as f64).sqrt()
    };
    let (small, large) = (rms_gap(25), rms_gap(200));
    // The gap is O(n^{-1/3}): a factor 2 from n = 25 to n = 200.
    assert!(large < 0.75 * small, "{small} -> {large}");
}

#[test]
fn shipped_tracy_widom_table() {
    let t = TracyWidomTable::from_path(shipped_table()).unwrap();
    assert!(!t.provenance().is_empty());
    assert!(t.median() < 0.0);
    assert!(
        (t.mean() - (-1.771_086_8)).abs() < 1e-3,
        "mean {}",
        t.mean()
    );
    assert!((t.cdf(-2.0) - 0.413).abs() < 1e-3);
    assert!(t.grid().count() > 100);
}
