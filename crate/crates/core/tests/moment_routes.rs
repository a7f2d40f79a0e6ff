use densmat::exact::{
    moment_explicit, moment_recurrence, moment_via_wishart_bridge, page_entropy, wishart_moment,
    EnsembleParams, MomentMethod, MomentTable, MAX_MOMENT_ORDER,
};
use proptest::prelude::*;

fn params(n: usize, k: usize) -> EnsembleParams {
    EnsembleParams::new(n, k).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn cycles(perm: &[usize]) -> u32 {
    let mut seen = vec![false; perm.len()];
    let mut count = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
        }
    }
    count
}

fn permutations(q: usize) -> Vec<Vec<usize>> {
    if q == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(q - 1) {
        for pos in 0..q {
            let mut v = p.clone();
            v.insert(pos, q - 1);
            out.push(v);
        }
    }
    out
}

/// Wick expansion: `E tr (X X*)^q = Σ_{σ ∈ S_q} k^{#σ} n^{#(γσ⁻¹)}` with `γ`
/// the cycle `i ↦ i+1 mod q`.
fn wick_wishart_moment(n: u64, k: u64, q: usize) -> u64 {
    let mut total = 0;
    for sigma in permutations(q) {
        let mut inv = vec![0; q];
        for (i, &s) in sigma.iter().enumerate() {
            inv[s] = i;
        }
        let gamma_sigma_inv: Vec<usize> = (0..q).map(|i| (inv[i] + 1) % q).collect();
        total += k.pow(cycles(&sigma)) * n.pow(cycles(&gamma_sigma_inv));
    }
    total
}

#[test]
fn wishart_moments_match_wick_expansion() {
    for n in 1..=6u64 {
        for k in 1..=6u64 {
            for q in 1..=6 {
                let exact = wick_wishart_moment(n, k, q) as f64;
                let got = wishart_moment(params(n as usize, k as usize), q).unwrap();
                assert_eq!(got, exact, "n={n} k={k} q={q}");
            }
        }
    }
}

#[test]
fn routes_agree_on_the_small_grid() {
    for n in 1..=50 {
        for k in 1..=50 {
            let p = params(n, k);
            let rec = MomentTable::compute(p, 10, MomentMethod::Recurrence).unwrap();
            for q in 1..=10 {
                let e = moment_explicit(p, q).unwrap();
                assert!(rel(rec.get(q).unwrap(), e) < 1e-10, "n={n} k={k} q={q}");
                assert!(
                    rel(moment_via_wishart_bridge(p, q).unwrap(), e) < 1e-10,
                    "n={n} k={k} q={q}"
                );
            }
        }
    }
}

#[test]
fn routes_stay_finite_and_close_up_to_the_documented_order() {
    for (n, k) in [(1, 1), (1, 50), (2, 2), (17, 31), (50, 1), (50, 50)] {
        let p = params(n, k);
        let rec = MomentTable::compute(p, MAX_MOMENT_ORDER, MomentMethod::Recurrence).unwrap();
        let exp = MomentTable::compute(p, MAX_MOMENT_ORDER, MomentMethod::Explicit).unwrap();
        let bri = MomentTable::compute(p, MAX_MOMENT_ORDER, MomentMethod::WishartBridge).unwrap();
        for q in 1..=MAX_MOMENT_ORDER {
            let e = exp.get(q).unwrap();
            assert!(e.is_finite() && e > 0.0);
            assert!(rel(rec.get(q).unwrap(), e) < 1e-8, "n={n} k={k} q={q}");
            assert!(rel(bri.get(q).unwrap(), e) < 1e-8, "n={n} k={k} q={q}");
        }
    }
}

#[test]
fn moments_are_symmetric_in_n_and_k() {
    for (n, k) in [(2, 5), (3, 4), (7, 19)] {
        for q in 1..=12 {
            assert_eq!(
                moment_explicit(params(n, k), q).unwrap(),
                moment_explicit(params(k, n), q).unwrap()
            );
        }
    }
}

#[test]
fn page_entropy_tends_to_log_n() {
    let h = page_entropy(params(2, 10_000)).unwrap();
    assert!((h - std::f64::consts::LN_2).abs() < 0.002);
    let mut prev = 0.0;
    for k in [3, 10, 100, 1000] {
        let h = page_entropy(params(3, k)).unwrap();
        assert!(h > prev && h < 3f64.ln());
        prev = h;
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(200) })]

    #[test]
    fn recurrence_matches_explicit(n in 1usize..=50, k in 1usize..=50, q in 1usize..=MAX_MOMENT_ORDER) {
        let p = params(n, k);
        let e = moment_explicit(p, q).unwrap();
        prop_assert!(rel(moment_recurrence(p, q).unwrap(), e) < 1e-8);
        prop_assert!(rel(moment_via_wishart_bridge(p, q).unwrap(), e) < 1e-8);
    }

    #[test]
    fn moments_decrease_in_q(n in 2usize..=30, k in 2usize..=30, q in 1usize..40) {
        // k = 1 gives pure states, for which every moment is 1.
        let p = params(n, k);
        prop_assert!(moment_explicit(p, q + 1).unwrap() < moment_explicit(p, q).unwrap());
    }

    #[test]
    fn moments_lie_between_pure_and_mixed(n in 1usize..=30, k in 1usize..=30, q in 2usize..20) {
        // n^{1−q} ≤ tr ρ^q ≤ 1 for every state.
        let m = moment_explicit(params(n, k), q).unwrap();
        prop_assert!(m <= 1.0);
        prop_assert!(m >= (n as f64).powi(1 - q as i32) * (1.0 - 1e-12));
    }
}
