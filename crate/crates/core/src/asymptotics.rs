//! Limit laws and goodness-of-fit tools.
//!
//! * [`MarchenkoPastur`]: bulk law of `c·n·λ(ρ)` (and of `λ(W)/n`) when
//!   `k/n → c`.
//! * [`TracyWidomTable`]: tabulated CDF of the GUE Tracy–Widom law, the limit
//!   of the edge statistics [`edge_rescale_density`] and
//!   [`edge_rescale_wishart`]. The repository ships a table in
//!   `data/tracy_widom_gue.txt`.
//! * [`ks_distance`], [`histogram`], [`chi_square_gof`]: comparisons between
//!   empirical and reference laws.

use crate::error::{Error, Result};
use crate::exact::EnsembleParams;
use crate::quadrature::integrate;
use crate::spectra::EmpiricalMeasure;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

const MP_ABS_TOL: f64 = 1e-11;

/// A cumulative distribution function usable as a KS reference.
pub trait ReferenceCdf {
    fn cdf(&self, x: f64) -> Result<f64>;

    /// Left limit `P(X < x)`; differs from [`ReferenceCdf::cdf`] only at atoms.
    fn cdf_left(&self, x: f64) -> Result<f64> {
        self.cdf(x)
    }

    /// Locations of the atoms of the reference law.
    fn jump_points(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<F: Fn(f64) -> f64> ReferenceCdf for F {
    fn cdf(&self, x: f64) -> Result<f64> {
        Ok(self(x))
    }
}

/// The Marchenko–Pastur law `μ_c`: an atom of mass `max(1 − c, 0)` at zero
/// plus the density `√((x−a)(b−x)) / (2πx)` on `[a, b]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarchenkoPastur {
    c: f64,
    a: f64,
    b: f64,
    atom_weight: f64,
}

impl MarchenkoPastur {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Parameter(format!(
                "Marchenko-Pastur ratio must be positive, got {c}"
            )));
        }
        let s = c.sqrt();
        Ok(Self {
            c,
            a: (s - 1.0) * (s - 1.0),
            b: (s + 1.0) * (s + 1.0),
            atom_weight: (1.0 - c).max(0.0),
        })
    }

    /// The law matching the realised aspect ratio `k/n` of a sample.
    pub fn for_params(p: EnsembleParams) -> Result<Self> {
        Self::new(p.c())
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Left edge `(√c − 1)²`.
    pub fn lower_edge(&self) -> f64 {
        self.a
    }

    /// Right edge `(√c + 1)²`.
    pub fn upper_edge(&self) -> f64 {
        self.b
    }

    pub fn atom_weight(&self) -> f64 {
        self.atom_weight
    }

    /// Density of the continuous part; zero outside `[a, b]`.
    pub fn pdf(&self, x: f64) -> f64 {
        if x <= self.a || x >= self.b || x <= 0.0 {
            return 0.0;
        }
        ((x - self.a) * (self.b - x)).sqrt() / (2.0 * PI * x)
    }

    /// `x = a + (b − a) sin²θ` maps `θ ∈ [0, π/2]` onto the support and
    /// removes the square-root edges; this is the integrand in `θ`.
    fn theta_integrand(&self, theta: f64, power: i32) -> f64 {
        let (s, co) = theta.sin_cos();
        let w = self.b - self.a;
        let x = self.a + w * s * s;
        if x <= 0.0 {
            return 0.0;
        }
        w * w * s * s * co * co / (PI * x) * x.powi(power)
    }

    fn theta_of(&self, x: f64) -> f64 {
        let t = ((x - self.a) / (self.b - self.a)).clamp(0.0, 1.0);
        t.sqrt().asin()
    }

    /// Mass of the continuous part, by quadrature (equals `min(1, c)`).
    pub fn continuous_mass(&self) -> Result<f64> {
        Ok(integrate(
            |t| self.theta_integrand(t, 0),
            0.0,
            FRAC_PI_2,
            MP_ABS_TOL,
            0.0,
        )?
        .value)
    }

    /// `μ_c((−∞, x])`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        let atom = if x >= 0.0 { self.atom_weight } else { 0.0 };
        if x <= self.a {
            return Ok(atom);
        }
        let upper = self.theta_of(x.min(self.b));
        let q = integrate(|t| self.theta_integrand(t, 0), 0.0, upper, MP_ABS_TOL, 0.0)?;
        Ok((atom + q.value).clamp(0.0, 1.0))
    }

    /// `∫ x^q dμ_c`; the atom at zero contributes nothing for `q ≥ 1`.
    pub fn moment(&self, q: u32) -> Result<f64> {
        if q == 0 {
            return Ok(1.0);
        }
        let power =
            i32::try_from(q).map_err(|_| Error::Parameter("moment order too large".into()))?;
        let scale = self.b.powi(power);
        // Integrate the scaled integrand so the tolerance is relative to b^q.
        let q = integrate(
            |t| self.theta_integrand(t, power) / scale,
            0.0,
            FRAC_PI_2,
            1e-13,
            0.0,
        )?;
        Ok(q.value * scale)
    }
}

impl ReferenceCdf for MarchenkoPastur {
    fn cdf(&self, x: f64) -> Result<f64> {
        MarchenkoPastur::cdf(self, x)
    }

    fn cdf_left(&self, x: f64) -> Result<f64> {
        let v = MarchenkoPastur::cdf(self, x)?;
        Ok(if x == 0.0 { v - self.atom_weight } else { v })
    }

    fn jump_points(&self) -> Vec<f64> {
        if self.atom_weight > 0.0 {
            vec![0.0]
        } else {
            Vec::new()
        }
    }
}

/// The standard normal law.
#[derive(Clone, Copy, Debug, Default)]
pub struct StandardNormal;

impl ReferenceCdf for StandardNormal {
    fn cdf(&self, x: f64) -> Result<f64> {
        Ok(Normal::standard().cdf(x))
    }
}

/// Tabulated CDF of the GUE Tracy–Widom law, linearly interpolated.
///
/// File format: plain text, one `s cdf` pair per line separated by ASCII
/// whitespace. A `#` starts a comment that runs to the end of the line; blank
/// lines are ignored. Each field is parsed with Rust's `f64` parser
/// (round-to-nearest) and must be finite. `s` must be strictly increasing,
/// `cdf` must lie in `[0, 1]` and be non-decreasing, the grid must cover
/// `[−5, 3]`, and the CDF must rise from below 0.001 to above 0.999.
#[derive(Clone, Debug, PartialEq)]
pub struct TracyWidomTable {
    s: Vec<f64>,
    cdf: Vec<f64>,
    provenance: String,
}

impl TracyWidomTable {
    pub const REQUIRED_LOW: f64 = -5.0;
    pub const REQUIRED_HIGH: f64 = 3.0;

    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Vec::new();
        let mut cdf = Vec::new();
        let mut provenance = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let (body, comment) = match raw.find('#') {
                Some(pos) => (&raw[..pos], Some(raw[pos + 1..].trim())),
                None => (raw, None),
            };
            if let Some(c) = comment {
                if body.trim().is_empty() && !c.is_empty() {
                    provenance.push(c.to_string());
                }
            }
            let fields: Vec<&str> = body.split_ascii_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            if fields.len() != 2 {
                return Err(Error::Table {
                    line,
                    message: format!("expected 2 fields, found {}", fields.len()),
                });
            }
            let parse = |f: &str| -> Result<f64> {
                let v: f64 = f.parse().map_err(|_| Error::Table {
                    line,
                    message: format!("cannot parse {f:?} as a number"),
                })?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Table {
                        line,
                        message: format!("non-finite value {f:?}"),
                    })
                }
            };
            let (x, f) = (parse(fields[0])?, parse(fields[1])?);
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::Table {
                    line,
                    message: format!("cdf value {f} outside [0, 1]"),
                });
            }
            if let (Some(&px), Some(&pf)) = (s.last(), cdf.last()) {
                if x <= px {
                    return Err(Error::Table {
                        line,
                        message: format!("s = {x} does not increase (previous {px})"),
                    });
                }
                if f < pf {
                    return Err(Error::Table {
                        line,
                        message: format!("cdf decreases from {pf} to {f}"),
                    });
                }
            }
            s.push(x);
            cdf.push(f);
        }
        let end = text.lines().count();
        let (Some(&lo), Some(&hi)) = (s.first(), s.last()) else {
            return Err(Error::Table {
                line: end,
                message: "table has no data rows".into(),
            });
        };
        if lo > Self::REQUIRED_LOW || hi < Self::REQUIRED_HIGH {
            return Err(Error::Table {
                line: end,
                message: format!(
                    "grid [{lo}, {hi}] does not cover [{}, {}]",
                    Self::REQUIRED_LOW,
                    Self::REQUIRED_HIGH
                ),
            });
        }
        if cdf[0] >= 0.001 || cdf[cdf.len() - 1] <= 0.999 {
            return Err(Error::Table {
                line: end,
                message: "cdf must rise from below 0.001 to above 0.999".into(),
            });
        }
        Ok(Self {
            s,
            cdf,
            provenance: provenance.join("\n"),
        })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Table {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    /// Header comments of the source file.
    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn grid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.s.iter().copied().zip(self.cdf.iter().copied())
    }

    /// Interpolated CDF; constant beyond the grid ends.
    pub fn cdf(&self, x: f64) -> f64 {
        let last = self.s.len() - 1;
        if x <= self.s[0] {
            return self.cdf[0];
        }
        if x >= self.s[last] {
            return self.cdf[last];
        }
        let i = self.s.partition_point(|&v| v <= x);
        let (x0, x1) = (self.s[i - 1], self.s[i]);
        let (f0, f1) = (self.cdf[i - 1], self.cdf[i]);
        f0 + (f1 - f0) * (x - x0) / (x1 - x0)
    }

    /// Smallest `s` with `cdf(s) ≥ p`, interpolated.
    pub fn quantile(&self, p: f64) -> f64 {
        let i = self.cdf.partition_point(|&f| f < p);
        if i == 0 {
            return self.s[0];
        }
        if i >= self.s.len() {
            return self.s[self.s.len() - 1];
        }
        let (x0, x1) = (self.s[i - 1], self.s[i]);
        let (f0, f1) = (self.cdf[i - 1], self.cdf[i]);
        if f1 == f0 {
            x1
        } else {
            x0 + (x1 - x0) * (p - f0) / (f1 - f0)
        }
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }

    /// Mean of the tabulated law, `s_hi − ∫ F` over the grid.
    pub fn mean(&self) -> f64 {
        let mut area = 0.0;
        for i in 1..self.s.len() {
            area += 0.5 * (self.cdf[i] + self.cdf[i - 1]) * (self.s[i] - self.s[i - 1]);
        }
        self.s[self.s.len() - 1] - area - self.s[0] * self.cdf[0]
    }
}

impl ReferenceCdf for TracyWidomTable {
    fn cdf(&self, x: f64) -> Result<f64> {
        Ok(TracyWidomTable::cdf(self, x))
    }
}

fn edge_scale(c: f64) -> f64 {
    let s = c.sqrt();
    (1.0 + s) * (1.0 + 1.0 / s).cbrt()
}

/// Right edge `(√c + 1)²` of the bulk law.
pub fn edge_location(c: f64) -> f64 {
    let s = c.sqrt();
    (s + 1.0) * (s + 1.0)
}

/// `n^{2/3} [c n λ_max(ρ) − (√c+1)²] / [(1+√c)(1+1/√c)^{1/3}]`.
pub fn edge_rescale_density(lam_max: f64, p: EnsembleParams) -> f64 {
    let n = p.n() as f64;
    let c = p.c();
    n.powf(2.0 / 3.0) * (c * n * lam_max - edge_location(c)) / edge_scale(c)
}

/// `[λ_max(W) − n(√c+1)²] / [n^{1/3}(1+√c)(1+1/√c)^{1/3}]`.
pub fn edge_rescale_wishart(lam_max: f64, p: EnsembleParams) -> f64 {
    let n = p.n() as f64;
    let c = p.c();
    (lam_max - n * edge_location(c)) / (n.cbrt() * edge_scale(c))
}

/// Standardised Wishart trace `(S − nk)/√(nk)`.
pub fn trace_clt_statistic(trace: f64, p: EnsembleParams) -> f64 {
    let nk = (p.n() * p.k()) as f64;
    (trace - nk) / nk.sqrt()
}

/// Kolmogorov–Smirnov distance `sup_x |F_emp(x) − F(x)|`, evaluated exactly:
/// both one-sided limits at every atom and at every jump of the reference.
pub fn ks_distance<R: ReferenceCdf + ?Sized>(emp: &EmpiricalMeasure, reference: &R) -> Result<f64> {
    let atoms = emp.atoms();
    let mut sup: f64 = 0.0;
    let mut before = 0.0;
    let mut i = 0;
    while i < atoms.len() {
        let x = atoms[i].0;
        let mut after = before;
        while i < atoms.len() && atoms[i].0 == x {
            after += atoms[i].1;
            i += 1;
        }
        let after = after.min(1.0);
        sup = sup
            .max((after - reference.cdf(x)?).abs())
            .max((before - reference.cdf_left(x)?).abs());
        before = after;
    }
    for j in reference.jump_points() {
        let e = emp.cdf(j);
        let e_left = e - atoms.iter().filter(|a| a.0 == j).map(|a| a.1).sum::<f64>();
        sup = sup
            .max((e - reference.cdf(j)?).abs())
            .max((e_left - reference.cdf_left(j)?).abs());
    }
    Ok(sup)
}

/// Two-sample Kolmogorov–Smirnov distance between equally weighted samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut sup: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
    }
    sup
}

/// Mass of the measure in each bin `[e_i, e_{i+1})`; the last bin is closed.
/// Atoms outside `[e_0, e_last]` are ignored.
pub fn histogram(emp: &EmpiricalMeasure, edges: &[f64]) -> Result<Vec<f64>> {
    if edges.len() < 2 {
        return Err(Error::Usage("histogram needs at least two edges".into()));
    }
    if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Usage(
            "histogram edges must be finite and strictly increasing".into(),
        ));
    }
    let last = edges.len() - 1;
    let mut masses = vec![0.0; last];
    for &(x, w) in emp.atoms() {
        if x < edges[0] || x > edges[last] {
            continue;
        }
        let bin = edges
            .partition_point(|&e| e <= x)
            .saturating_sub(1)
            .min(last - 1);
        masses[bin] += w;
    }
    Ok(masses)
}

/// `count + 1` equally spaced edges spanning `[lo, hi]`.
pub fn uniform_edges(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..=count)
        .map(|i| lo + (hi - lo) * i as f64 / count as f64)
        .collect()
}

/// Outcome of a goodness-of-fit comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoFReport {
    pub statistic: String,
    pub value: f64,
    pub sample_size: usize,
    /// Upper bound on `value` (KS) or lower bound on `p_value` (chi-square).
    pub threshold: f64,
    pub p_value: Option<f64>,
    pub passed: bool,
}

impl GoFReport {
    /// KS distance compared against an upper threshold.
    pub fn ks(value: f64, sample_size: usize, threshold: f64) -> Self {
        Self {
            statistic: "kolmogorov_smirnov".into(),
            value,
            sample_size,
            threshold,
            p_value: None,
            passed: value < threshold,
        }
    }
}

/// Pearson chi-square test of bin counts against bin probabilities.
///
/// Adjacent bins are pooled left to right until each group expects at least
/// `min_expected` counts (a short remainder joins the last group). Passes when
/// the p-value exceeds `p_threshold`.
pub fn chi_square_gof(
    counts: &[u64],
    probabilities: &[f64],
    min_expected: f64,
    p_threshold: f64,
) -> Result<GoFReport> {
    if counts.len() != probabilities.len() || counts.is_empty() {
        return Err(Error::Usage(
            "counts and probabilities must be non-empty and of equal length".into(),
        ));
    }
    let total: u64 = counts.iter().sum();
    let n = total as f64;
    let mut groups: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probabilities) {
        obs += c as f64;
        exp += p * n;
        if exp >= min_expected {
            groups.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if exp > 0.0 || obs > 0.0 {
        match groups.last_mut() {
            Some(g) => {
                g.0 += obs;
                g.1 += exp;
            }
            None => groups.push((obs, exp)),
        }
    }
    if groups.len() < 2 {
        return Err(Error::Usage(
            "too few populated bins for a chi-square test".into(),
        ));
    }
    if groups.iter().any(|g| g.1 <= 0.0) {
        return Err(Error::Usage("a bin group has zero expected count".into()));
    }
    let stat: f64 = groups.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = (groups.len() - 1) as f64;
    let dist = ChiSquared::new(dof).map_err(|e| Error::Numerical(e.to_string()))?;
    let p_value = dist.sf(stat);
    Ok(GoFReport {
        statistic: "chi_square".into(),
        value: stat,
        sample_size: total as usize,
        threshold: p_threshold,
        p_value: Some(p_value),
        passed: p_value > p_threshold,
    })
}
