//! Acceptance suite. One `[PASS]`/`[FAIL]` line per criterion; the process
//! fails only when a criterion outside `UNATTAINABLE` fails.

use densmat::asymptotics::trace_clt_statistic;
use densmat::exact::{log_density_eigs, EnsembleParams, MomentMethod, MomentTable};
use densmat::montecarlo::{pearson_correlation, run_draws, Summary};
use densmat::quadrature::integrate;
use densmat::sampling::{sample_ginibre, wishart_from_factor};
use densmat::spectra::wishart_spectrum;
use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

const SEED: u64 = 7;
const Z_MAX: f64 = 4.0;
const MOMENT_REL_TOL: f64 = 1e-10;
const CLOSED_FORM_REL_TOL: f64 = 1e-14;
const CHI_SQUARE_P_MIN: f64 = 1e-3;
const MASS_TOL: f64 = 1e-8;
const CORR_MAX: f64 = 0.03;
const LLN_TOL: f64 = 0.02;
const CLT_MEAN_TOL: f64 = 0.13;
const CLT_VAR_TOL: f64 = 0.15;
const MP_KS_MAX: f64 = 0.05;
const EDGE_LOW: f64 = 3.92;
const EDGE_HIGH: f64 = 4.08;
const SD_REL_TOL: f64 = 0.25;
const TW_KS_MAX: f64 = 0.15;
const ENTROPY_LOG2_TOL: f64 = 0.002;

/// The per-draw clause of criterion 6 asks every one of 1000 draws to lie
/// within 2.83 standard deviations; it holds with probability about 0.009.
const UNATTAINABLE: &[u32] = &[6];

struct Outcome {
    id: u32,
    passed: bool,
}

fn report(id: u32, title: &str, passed: bool, detail: String) -> Outcome {
    println!(
        "[{}] {id}. {title}: {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    Outcome { id, passed }
}

fn densmat(args: &[&str], out: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_densmat"))
        .args(args)
        .args(["--seed", &SEED.to_string(), "--out"])
        .arg(out)
        .output()
        .expect("binary runs")
        .status
        .code()
        .unwrap_or(-1)
}

/// Columns by header name; every cell parsed as f64.
fn table(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines
        .next()
        .expect("header")
        .split(',')
        .map(String::from)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().expect("numeric")).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

fn check_value(report: &Path, name: &str) -> f64 {
    let v: Value =
        serde_json::from_str(&fs::read_to_string(report).expect("report")).expect("json");
    v["checks"]
        .as_array()
        .expect("checks")
        .iter()
        .find(|c| c["name"] == name)
        .and_then(|c| c["value"].as_f64())
        .unwrap_or(f64::NAN)
}

fn data_section(path: &Path) -> String {
    fs::read_to_string(path)
        .expect("table")
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

fn tw_table_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/tracy_widom_gue.txt")
}

fn closed_form(n: f64, k: f64, q: usize) -> f64 {
    let m = n * k;
    match q {
        2 => (n + k) / (m + 1.0),
        3 => (n * n + 3.0 * m + k * k + 1.0) / ((m + 1.0) * (m + 2.0)),
        4 => {
            (n.powi(3) + 6.0 * n * n * k + 6.0 * n * k * k + k.powi(3) + 5.0 * n + 5.0 * k)
                / ((m + 1.0) * (m + 2.0) * (m + 3.0))
        }
        _ => unreachable!(),
    }
}

fn moment_exactness() -> Outcome {
    let start = Instant::now();
    let mut worst_routes: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;
    for (n, k) in [(2, 2), (2, 5), (3, 4), (5, 5), (10, 20)] {
        let p = EnsembleParams::new(n, k).unwrap();
        let tables: Vec<MomentTable> = [
            MomentMethod::Explicit,
            MomentMethod::Recurrence,
            MomentMethod::WishartBridge,
        ]
        .into_iter()
        .map(|m| MomentTable::compute(p, 10, m).unwrap())
        .collect();
        for q in 1..=10 {
            let v: Vec<f64> = tables.iter().map(|t| t.get(q).unwrap()).collect();
            for a in &v {
                for b in &v {
                    worst_routes = worst_routes.max((a - b).abs() / a.abs());
                }
            }
            if (2..=4).contains(&q) {
                let want = closed_form(n as f64, k as f64, q);
                for a in &v {
                    worst_closed = worst_closed.max((a - want).abs() / want);
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let passed = worst_routes < MOMENT_REL_TOL && worst_closed < CLOSED_FORM_REL_TOL && secs < 1.0;
    report(
        1,
        "moment exactness",
        passed,
        format!("route discrepancy {worst_routes:.2e} < {MOMENT_REL_TOL:e}, closed forms {worst_closed:.2e} < {CLOSED_FORM_REL_TOL:e}, {secs:.3} s < 1 s"),
    )
}

fn monte_carlo_moments(dir: &Path) -> Outcome {
    let out = dir.join("c2");
    let start = Instant::now();
    densmat(
        &[
            "sample",
            "--n",
            "2",
            "--k",
            "2",
            "--samples",
            "100000",
            "--q-max",
            "4",
        ],
        &out,
    );
    let secs = start.elapsed().as_secs_f64();
    let (h, rows) = table(&out.join("sample_summary.csv"));
    let (mean, se) = (col(&h, "mc_mean"), col(&h, "std_error"));
    // q = 4 is compared with the closed form 22/35; see the decisions ledger for 0.4.
    let targets = [(2, 0.8), (3, 0.7), (4, 22.0 / 35.0)];
    let mut passed = secs < 30.0;
    let mut parts = Vec::new();
    for (q, target) in targets {
        let r = &rows[q - 1];
        let z = (r[mean] - target).abs() / r[se];
        passed &= z < Z_MAX;
        parts.push(format!("q={q} mean {:.5} z {z:.2}", r[mean]));
    }
    let z04 = (rows[3][mean] - 0.4).abs() / rows[3][se];
    parts.push(format!("(q=4 vs 0.4: z {z04:.0})"));
    parts.push(format!("{secs:.1} s < 30 s"));
    report(2, "Monte Carlo vs exact moments", passed, parts.join(", "))
}

fn eigenvalue_density(dir: &Path) -> Outcome {
    let start = Instant::now();
    let mut passed = true;
    let mut parts = Vec::new();
    for k in [2, 10, 50] {
        let out = dir.join(format!("c3_{k}"));
        densmat(
            &[
                "density",
                "--n",
                "2",
                "--k",
                &k.to_string(),
                "--samples",
                "100000",
                "--bins",
                "50",
            ],
            &out,
        );
        let p = check_value(&out.join("density_report.json"), "chi_square_pvalue");
        passed &= p > CHI_SQUARE_P_MIN;
        parts.push(format!("k={k} p={p:.3}"));
    }
    let secs = start.elapsed().as_secs_f64();
    passed &= secs < 60.0;
    parts.push(format!("all p > {CHI_SQUARE_P_MIN}, {secs:.1} s < 60 s"));
    report(3, "eigenvalue density law", passed, parts.join(", "))
}

fn density_normalisation() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in [2, 3, 5, 10] {
        let p = EnsembleParams::new(2, k).unwrap();
        let phi = |x: f64| log_density_eigs(p, &[x, 1.0 - x]).map_or(0.0, f64::exp);
        let mass = integrate(phi, 0.0, 1.0, 1e-12, 0.0).unwrap().value;
        worst = worst.max((mass - 1.0).abs());
    }
    report(
        4,
        "density normalisation",
        worst < MASS_TOL,
        format!("max |mass − 1| {worst:.2e} < {MASS_TOL:e}"),
    )
}

fn trace_independence() -> Outcome {
    let (n, k) = (5, 8);
    let pairs = run_draws(SEED, 10_000, 1, |_, rng| {
        let w = wishart_from_factor(&sample_ginibre(n, k, rng)?);
        let s = w.trace();
        let purity: f64 = wishart_spectrum(&w)?
            .values()
            .iter()
            .map(|l| (l / s).powi(2))
            .sum();
        Ok((s, purity))
    })
    .unwrap();
    let (s, t): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let r = pearson_correlation(&s, &t).unwrap();
    report(
        5,
        "eigenvalue-trace independence",
        r.abs() < CORR_MAX,
        format!("|corr| {:.4} < {CORR_MAX}", r.abs()),
    )
}

fn trace_lln_clt() -> Outcome {
    let p = EnsembleParams::new(100, 200).unwrap();
    let nk = 20_000.0;
    let traces = run_draws(SEED, 1000, 1, |_, rng| {
        Ok(wishart_from_factor(&sample_ginibre(100, 200, rng)?).trace())
    })
    .unwrap();
    let outside = traces
        .iter()
        .filter(|&&s| (s / nk - 1.0).abs() > LLN_TOL)
        .count();
    let worst = traces
        .iter()
        .map(|&s| (s / nk - 1.0).abs())
        .fold(0.0, f64::max);
    let z: Vec<f64> = traces.iter().map(|&s| trace_clt_statistic(s, p)).collect();
    let sum = Summary::from_values(&z).unwrap();
    let clt = sum.mean.abs() < CLT_MEAN_TOL && (sum.variance - 1.0).abs() < CLT_VAR_TOL;
    report(
        6,
        "trace LLN/CLT",
        outside == 0 && clt,
        format!(
            "{outside}/1000 draws outside 1 ± {LLN_TOL} (max dev {worst:.4}); standardized mean {:.4} (±{CLT_MEAN_TOL}), variance {:.4} (1 ± {CLT_VAR_TOL})",
            sum.mean, sum.variance
        ),
    )
}

fn marchenko_pastur(dir: &Path) -> Outcome {
    let start = Instant::now();
    let one = dir.join("c7a");
    densmat(
        &["mp", "--n", "1000", "--k", "2000", "--samples", "1"],
        &one,
    );
    let (h, rows) = table(&one.join("mp_ks.csv"));
    let ks = rows[0][col(&h, "ks")];
    let sweep = dir.join("c7b");
    densmat(
        &["mp", "--n-list", "200,1000", "--c", "1", "--samples", "5"],
        &sweep,
    );
    let (h, rows) = table(&sweep.join("mp_summary.csv"));
    let m = col(&h, "median_ks");
    let (small, large) = (rows[0][m], rows[1][m]);
    let secs = start.elapsed().as_secs_f64();
    report(
        7,
        "Marchenko-Pastur bulk",
        ks < MP_KS_MAX && large < small && secs < 120.0,
        format!("KS(1000, 2000) {ks:.4} < {MP_KS_MAX}; median KS n=200 {small:.4} > n=1000 {large:.4}; {secs:.1} s < 120 s"),
    )
}

/// Edge draws shared by criteria 8 and 9: 500 draws at n = 500 and n = 1000.
/// Streams are keyed by draw index, so the first 200 draws at n = 1000 are
/// exactly a 200-draw run.
fn edge_run(dir: &Path) -> PathBuf {
    let out = dir.join("c89");
    let tw = tw_table_path();
    densmat(
        &[
            "edge",
            "--n-list",
            "500,1000",
            "--c",
            "1",
            "--samples",
            "500",
            "--tw-table",
            tw.to_str().unwrap(),
        ],
        &out,
    );
    out
}

fn largest_eigenvalue(edge: &Path) -> Outcome {
    let (h, rows) = table(&edge.join("edge_draws.csv"));
    let (n, draw, s) = (col(&h, "n"), col(&h, "draw"), col(&h, "cn_lambda_max"));
    let vals: Vec<f64> = rows
        .iter()
        .filter(|r| r[n] == 1000.0 && r[draw] < 200.0)
        .map(|r| r[s])
        .collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    report(
        8,
        "largest eigenvalue limit",
        vals.len() == 200 && (EDGE_LOW..=EDGE_HIGH).contains(&mean),
        format!(
            "mean c·n·λ_max over {} draws {mean:.4} ∈ [{EDGE_LOW}, {EDGE_HIGH}]",
            vals.len()
        ),
    )
}

fn edge_fluctuations(edge: &Path) -> Outcome {
    let (h, rows) = table(&edge.join("edge_summary.csv"));
    let (sd, ks) = (col(&h, "sd_t"), col(&h, "ks_tw"));
    let (sd500, sd1000) = (rows[0][sd], rows[1][sd]);
    let rel = (sd500 - sd1000).abs() / sd1000;
    let ks500 = rows[0][ks];
    report(
        9,
        "edge fluctuation scaling",
        rel < SD_REL_TOL && ks500 < TW_KS_MAX,
        format!(
            "sd(t) n=500 {sd500:.4}, n=1000 {sd1000:.4}, rel diff {rel:.3} < {SD_REL_TOL}; KS vs Tracy-Widom at n=500 {ks500:.4} < {TW_KS_MAX} (property-level check only; the exact limit law is not resolved at this scale)"
        ),
    )
}

fn first_model(dir: &Path) -> Outcome {
    let a = dir.join("c10a");
    densmat(
        &["firstmodel", "--n", "2", "--k", "2", "--samples", "100000"],
        &a,
    );
    let (h, rows) = table(&a.join("firstmodel.csv"));
    let r = &rows[0];
    let z_ent = (r[col(&h, "mc_entropy")] - 1.0 / 3.0).abs() / r[col(&h, "entropy_se")];
    let z_dir = (r[col(&h, "dirichlet_mc")] - 1.0 / 6.0).abs() / r[col(&h, "dirichlet_se")];
    let b = dir.join("c10b");
    densmat(
        &[
            "firstmodel",
            "--n",
            "2",
            "--k",
            "10000",
            "--samples",
            "1000",
        ],
        &b,
    );
    let (h, rows) = table(&b.join("firstmodel.csv"));
    let dev = (rows[0][col(&h, "mc_entropy")] - 2f64.ln()).abs();
    let c = dir.join("c10c");
    densmat(
        &[
            "firstmodel",
            "--n",
            "3",
            "--k-list",
            "3,10,100",
            "--samples",
            "10000",
        ],
        &c,
    );
    let (h, rows) = table(&c.join("firstmodel.csv"));
    let d: Vec<f64> = rows.iter().map(|r| r[col(&h, "mc_sq_distance")]).collect();
    let decreasing = d.windows(2).all(|w| w[1] < w[0]);
    report(
        10,
        "first model",
        z_ent < Z_MAX && z_dir < Z_MAX && dev < ENTROPY_LOG2_TOL && decreasing,
        format!(
            "entropy (2,2) z {z_ent:.2}; Dirichlet (2, α=1) z {z_dir:.2}; |entropy(2,10⁴) − log 2| {dev:.2e} < {ENTROPY_LOG2_TOL}; distances n=3 {:.4} > {:.4} > {:.5}",
            d[0], d[1], d[2]
        ),
    )
}

fn determinism(dir: &Path) -> Outcome {
    let tw = tw_table_path();
    let runs: [(&str, Vec<&str>, &[&str]); 6] = [
        (
            "sample",
            vec!["--n", "3", "--k", "5", "--samples", "500"],
            &["sample_spectra", "sample_summary"],
        ),
        (
            "density",
            vec!["--n", "2", "--k", "4", "--samples", "2000"],
            &["density_curve", "density_histogram"],
        ),
        (
            "density",
            vec!["--n", "3", "--k", "3", "--samples", "500", "--grid", "30"],
            &["density_curve", "density_points"],
        ),
        (
            "moments",
            vec!["--n", "4", "--k", "6", "--q-max", "12"],
            &["moments"],
        ),
        (
            "mp",
            vec!["--n-list", "50,100", "--c", "0.5", "--samples", "3"],
            &["mp_ks", "mp_histogram", "mp_summary"],
        ),
        (
            "firstmodel",
            vec!["--n", "3", "--k-list", "2,4", "--samples", "500"],
            &["firstmodel"],
        ),
    ];
    let mut mismatched = Vec::new();
    let mut all: Vec<(&str, Vec<&str>, &[&str])> = runs.into_iter().collect();
    all.push((
        "edge",
        vec![
            "--n",
            "40",
            "--samples",
            "100",
            "--tw-table",
            tw.to_str().unwrap(),
        ],
        &["edge_draws", "edge_summary"],
    ));
    for (i, (cmd, args, files)) in all.iter().enumerate() {
        let mut outs = Vec::new();
        for workers in ["1", "2"] {
            let out = dir.join(format!("c11_{i}_{workers}"));
            let mut full = vec![*cmd];
            full.extend(args.iter().copied());
            full.extend(["--workers", workers]);
            densmat(&full, &out);
            outs.push(out);
        }
        for f in *files {
            let name = format!("{f}.csv");
            if data_section(&outs[0].join(&name)) != data_section(&outs[1].join(&name)) {
                mismatched.push(format!("{cmd}/{name}"));
            }
        }
    }
    report(
        11,
        "determinism",
        mismatched.is_empty(),
        if mismatched.is_empty() {
            "all 7 command configurations byte-identical with 1 and 2 workers".into()
        } else {
            format!("differs: {}", mismatched.join(", "))
        },
    )
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let d = dir.path();
    let mut outcomes = vec![
        moment_exactness(),
        monte_carlo_moments(d),
        eigenvalue_density(d),
        density_normalisation(),
        trace_independence(),
        trace_lln_clt(),
        marchenko_pastur(d),
    ];
    let edge = edge_run(d);
    outcomes.push(largest_eigenvalue(&edge));
    outcomes.push(edge_fluctuations(&edge));
    outcomes.push(first_model(d));
    outcomes.push(determinism(d));

    let failed: Vec<u32> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.id)
        .collect();
    let unexpected: Vec<u32> = failed
        .iter()
        .copied()
        .filter(|id| !UNATTAINABLE.contains(id))
        .collect();
    println!(
        "acceptance: {}/{} criteria passed; failed {:?} (documented as unattainable: {:?})",
        outcomes.len() - failed.len(),
        outcomes.len(),
        failed,
        UNATTAINABLE
    );
    if !unexpected.is_empty() {
        eprintln!("unexpected acceptance failures: {unexpected:?}");
        std::process::exit(1);
    }
}
