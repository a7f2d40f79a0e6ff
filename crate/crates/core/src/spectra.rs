//! Spectra of Hermitian matrices and the empirical measures built from them.

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::sampling::{neumaier_sum, DensityMatrix, WishartSample};
use faer::diag::Diag;
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self_adjoint_evd, self_adjoint_evd_scratch, ComputeEigenvectors};
use faer::{Mat, Par};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Accepted Hermitian defect of eigensolver input, relative to `max(1, ‖M‖_F)`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Absolute threshold below which a density-matrix eigenvalue counts as zero.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-10;

/// Where a spectrum came from; fixes which bulk rescaling applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumSource {
    /// Any Hermitian matrix.
    Hermitian,
    /// Wishart matrix with parameters `(n, k)`.
    Wishart { n: usize, k: usize },
    /// Density matrix drawn from `μ_{n,k}`.
    Density { n: usize, k: usize },
}

/// Rescaling applied to eigenvalue locations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rescale {
    None,
    /// `λ / n` for Wishart eigenvalues.
    WishartBulk,
    /// `c·n·λ` with `c = k/n` for density-matrix eigenvalues.
    DensityBulk,
}

/// Eigenvalues sorted ascending, with provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    source: SpectrumSource,
    rescale: Rescale,
}

impl Spectrum {
    /// Sorts the values (stable, ties keep input order).
    pub fn new(mut values: Vec<f64>, source: SpectrumSource) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSpectrum("empty spectrum".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpectrum("non-finite eigenvalue".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self {
            values,
            source,
            rescale: Rescale::None,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source(&self) -> SpectrumSource {
        self.source
    }

    pub fn rescale(&self) -> Rescale {
        self.rescale
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        neumaier_sum(self.values.iter().copied())
    }

    /// `Σ λ^q`.
    pub fn power_sum(&self, q: i32) -> f64 {
        neumaier_sum(self.values.iter().map(|v| v.powi(q)))
    }

    /// Index of the largest value; the last one among ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v >= self.values[best] {
                best = i;
            }
        }
        best
    }

    /// Locations after the requested rescaling. The scale factor is derived
    /// from the source parameters, so the rescaling must match the source.
    pub fn rescaled(&self, rescale: Rescale) -> Result<Spectrum> {
        if rescale == self.rescale {
            return Ok(self.clone());
        }
        if self.rescale != Rescale::None {
            return Err(Error::Usage(format!(
                "spectrum already rescaled with {:?}",
                self.rescale
            )));
        }
        let factor = match (rescale, self.source) {
            (Rescale::None, _) => 1.0,
            (Rescale::WishartBulk, SpectrumSource::Wishart { n, .. }) => 1.0 / n as f64,
            // c·n = (k/n)·n = k.
            (Rescale::DensityBulk, SpectrumSource::Density { k, .. }) => k as f64,
            (r, s) => {
                return Err(Error::Usage(format!(
                    "rescaling {r:?} does not apply to a {s:?} spectrum"
                )))
            }
        };
        Ok(Spectrum {
            values: self.values.iter().map(|v| v * factor).collect(),
            source: self.source,
            rescale,
        })
    }
}

/// Eigen-decomposition `M = V diag(values) V*` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `‖M − V D V*‖_F`.
    pub fn reconstruction_residual(&self, m: &ComplexMatrix) -> Result<f64> {
        let n = self.values.len();
        let v = self.vectors.as_faer();
        let vd = Mat::<Complex64>::from_fn(n, n, |i, j| v[(i, j)] * self.values[j]);
        let recon = &vd * v.adjoint();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (m.get(i, j) - recon[(i, j)]).norm_sqr();
            }
        }
        Ok(acc.sqrt())
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    let dev = m.hermitian_deviation()?;
    if dev > HERMITIAN_TOL {
        return Err(Error::Shape(format!(
            "matrix is not Hermitian within {HERMITIAN_TOL:e} (deviation {dev:e})"
        )));
    }
    Ok(())
}

fn evd(m: &ComplexMatrix, vectors: bool) -> Result<(Vec<f64>, Option<Mat<Complex64>>)> {
    check_hermitian(m)?;
    let n = m.rows();
    // Column-major copy: faer reads the lower triangle.
    let a = m.as_faer().to_owned();
    let mut s = Diag::<Complex64>::zeros(n);
    let mut u = vectors.then(|| Mat::<Complex64>::zeros(n, n));
    let which = if vectors {
        ComputeEigenvectors::Yes
    } else {
        ComputeEigenvectors::No
    };
    let par = Par::Seq;
    let mut mem = MemBuffer::new(self_adjoint_evd_scratch::<Complex64>(
        n,
        which,
        par,
        Default::default(),
    ));
    self_adjoint_evd(
        a.as_ref(),
        s.as_mut(),
        u.as_mut().map(|u| u.as_mut()),
        par,
        MemStack::new(&mut mem),
        Default::default(),
    )
    .map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))?;
    let values: Vec<f64> = (0..n).map(|i| s[i].re).collect();
    Ok((values, u))
}

/// Eigenvalues of a Hermitian matrix, ascending. Eigenvectors are not formed.
pub fn eigenvalues_hermitian(m: &ComplexMatrix) -> Result<Spectrum> {
    let (values, _) = evd(m, false)?;
    Spectrum::new(values, SpectrumSource::Hermitian)
}

/// Full eigen-decomposition, for callers that need the vectors.
pub fn eigen_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let (values, u) = evd(m, true)?;
    let u = u.expect("vectors requested");
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let n = values.len();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| u[(i, order[j])])?;
    Ok(HermitianEigen {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors,
    })
}

/// Spectrum of a Wishart matrix.
pub fn wishart_spectrum(w: &WishartSample) -> Result<Spectrum> {
    let (values, _) = evd(w.matrix(), false)?;
    Spectrum::new(values, SpectrumSource::Wishart { n: w.n(), k: w.k() })
}

/// Spectrum of a density matrix. When `n > k` the `n − k` smallest
/// eigenvalues vanish; those within [`ZERO_EIGENVALUE_TOL`] of zero are
/// reported as exact zeros.
pub fn density_spectrum(rho: &DensityMatrix) -> Result<Spectrum> {
    let (n, k) = (rho.n(), rho.k());
    let (mut values, _) = evd(rho.matrix(), false)?;
    values.sort_by(f64::total_cmp);
    if n > k {
        for v in values.iter_mut().take(n - k) {
            if v.abs() <= ZERO_EIGENVALUE_TOL {
                *v = 0.0;
            }
        }
    }
    if let Some(v) = values.iter().find(|v| **v < -ZERO_EIGENVALUE_TOL) {
        return Err(Error::Numerical(format!(
            "density matrix has eigenvalue {v:e}"
        )));
    }
    Spectrum::new(values, SpectrumSource::Density { n, k })
}

/// Probability measure made of weighted point masses, sorted by location.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    atoms: Vec<(f64, f64)>,
}

impl EmpiricalMeasure {
    pub const WEIGHT_TOL: f64 = 1e-12;

    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Usage("empirical measure needs atoms".into()));
        }
        if atoms
            .iter()
            .any(|(x, w)| !x.is_finite() || !w.is_finite() || *w < 0.0)
        {
            return Err(Error::Usage(
                "atoms need finite locations and non-negative weights".into(),
            ));
        }
        let total = neumaier_sum(atoms.iter().map(|a| a.1));
        if (total - 1.0).abs() > Self::WEIGHT_TOL {
            return Err(Error::Usage(format!("weights sum to {total}, not 1")));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { atoms })
    }

    /// Equal weight `1/len` on each location.
    pub fn uniform(locations: &[f64]) -> Result<Self> {
        let w = 1.0 / locations.len() as f64;
        Self::new(locations.iter().map(|&x| (x, w)).collect())
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn moment(&self, q: i32) -> f64 {
        neumaier_sum(self.atoms.iter().map(|(x, w)| w * x.powi(q)))
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let idx = self.atoms.partition_point(|a| a.0 <= x);
        neumaier_sum(self.atoms[..idx].iter().map(|a| a.1))
    }
}

/// The empirical spectral measure: one atom of weight `1/n` per eigenvalue,
/// at the rescaled location.
pub fn empirical_measure(s: &Spectrum, rescale: Rescale) -> Result<EmpiricalMeasure> {
    let r = s.rescaled(rescale)?;
    EmpiricalMeasure::uniform(r.values())
}

/// Largest eigenvalue.
pub fn largest_eigenvalue(s: &Spectrum) -> f64 {
    s.values()[s.argmax()]
}

/// Von Neumann entropy `−Σ λ log λ` (natural log, `0 log 0 = 0`) of a
/// spectrum on the simplex. Values in `[−1e−10, 0)` are treated as zero.
pub fn von_neumann_entropy(s: &Spectrum) -> Result<f64> {
    if let Some(v) = s.values().iter().find(|v| **v < -ZERO_EIGENVALUE_TOL) {
        return Err(Error::InvalidSpectrum(format!("negative eigenvalue {v:e}")));
    }
    let total = s.sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidSpectrum(format!(
            "eigenvalues sum to {total}, not 1"
        )));
    }
    let h = neumaier_sum(
        s.values()
            .iter()
            .map(|&v| if v > 0.0 { -v * v.ln() } else { 0.0 }),
    );
    Ok(h.max(0.0))
}
