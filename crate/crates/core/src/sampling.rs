//! Samplers for the induced measures.
//!
//! A uniform pure state on `C^n ⊗ C^k` is represented by an `n × k` matrix
//! `X` of i.i.d. standard complex Gaussians (the class of a Gaussian vector is
//! uniformly distributed on the rays). The reduced state is
//! `ρ = X X* / tr(X X*)`, which is exactly `W / tr W` for the complex Wishart
//! matrix `W = X X*`.

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::rng::RngStream;
use num_complex::Complex64;
use rand_distr::{Distribution, Gamma};

/// Tolerance on `tr ρ = 1` and on the Hermitian defect of density matrices.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue tolerated in a positive semidefinite matrix, relative
/// to its norm.
pub const PSD_TOL: f64 = 1e-10;

/// `W = X X*` together with its trace `S`.
#[derive(Clone, Debug)]
pub struct WishartSample {
    matrix: ComplexMatrix,
    n: usize,
    k: usize,
    trace: f64,
}

impl WishartSample {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// System dimension `n` (rows of the factor).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Environment dimension `k` (columns of the factor).
    pub fn k(&self) -> usize {
        self.k
    }

    /// Sum of the diagonal entries as computed.
    pub fn trace(&self) -> f64 {
        self.trace
    }
}

/// A Hermitian, positive semidefinite, unit-trace matrix drawn from `μ_{n,k}`.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    n: usize,
    k: usize,
}

impl DensityMatrix {
    /// Wrap a matrix as a density matrix of the law `μ_{n,k}` after checking
    /// the unit-trace and Hermitian invariants. Positivity is checked through
    /// the spectrum, see [`crate::spectra::density_spectrum`].
    pub fn new(matrix: ComplexMatrix, k: usize) -> Result<Self> {
        let dev = matrix.hermitian_deviation()?;
        if dev > TRACE_TOL {
            return Err(Error::Shape(format!(
                "density matrix is not Hermitian (deviation {dev:e})"
            )));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::Parameter(format!("density matrix has trace {tr}")));
        }
        if k == 0 {
            return Err(Error::Dimension {
                rows: matrix.rows(),
                cols: k,
            });
        }
        let n = matrix.rows();
        Ok(Self { matrix, n, k })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `tr ρ²`, i.e. the squared Frobenius norm (the purity).
    pub fn purity(&self) -> f64 {
        self.matrix.frobenius_norm_sqr()
    }

    /// Conjugate by a unitary: `U ρ U*`. `U` is not checked for unitarity
    /// beyond the resulting trace test.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        let m = u.matmul(&self.matrix)?.matmul(&u.adjoint())?;
        let n = m.rows();
        // Restore exact Hermitian symmetry lost to rounding in the products.
        let sym = ComplexMatrix::from_fn(n, n, |i, j| 0.5 * (m.get(i, j) + m.get(j, i).conj()))?;
        Self::new(sym, self.k)
    }

    #[cfg(debug_assertions)]
    fn debug_check(&self) {
        let tr = self.matrix.trace().re;
        debug_assert!((tr - 1.0).abs() <= TRACE_TOL, "trace {tr}");
        debug_assert!(self.matrix.hermitian_deviation().unwrap_or(f64::INFINITY) <= TRACE_TOL);
        for i in 0..self.n {
            debug_assert!(self.matrix.get(i, i).re >= -PSD_TOL, "negative diagonal");
        }
    }
}

/// A point of the probability simplex `Σ_{n−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Domain("empty simplex vector".into()));
        }
        if coords.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::Domain(format!(
                "coordinates must lie in [0, 1]: {coords:?}"
            )));
        }
        let sum = neumaier_sum(coords.iter().copied());
        if (sum - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::Domain(format!("coordinates sum to {sum}, not 1")));
        }
        Ok(Self(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Squared Euclidean distance to the barycentre `(1/n, …, 1/n)`.
    pub fn sq_distance_to_center(&self) -> f64 {
        let c = 1.0 / self.0.len() as f64;
        self.0.iter().map(|x| (x - c) * (x - c)).sum()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for SimplexVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `n × k` matrix of i.i.d. `N_C(0, 1)` entries, filled row by row.
pub fn sample_ginibre(n: usize, k: usize, rng: &mut RngStream) -> Result<ComplexMatrix> {
    if n == 0 || k == 0 {
        return Err(Error::Dimension { rows: n, cols: k });
    }
    let entries = (0..n * k).map(|_| rng.complex_normal()).collect();
    Ok(ComplexMatrix::from_parts(n, k, entries))
}

/// Unit vector uniformly distributed on the sphere of `C^dim` (a normalised
/// Gaussian vector).
pub fn sample_pure_state(dim: usize, rng: &mut RngStream) -> Result<Vec<Complex64>> {
    if dim == 0 {
        return Err(Error::Dimension { rows: dim, cols: 1 });
    }
    let v: Vec<Complex64> = (0..dim).map(|_| rng.complex_normal()).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Degenerate("zero Gaussian vector".into()));
    }
    Ok(v.into_iter().map(|z| z / norm).collect())
}

/// `W = X X*`.
pub fn wishart_from_factor(x: &ComplexMatrix) -> WishartSample {
    let matrix = x.gram();
    let trace = (0..matrix.rows()).map(|i| matrix.get(i, i).re).sum();
    WishartSample {
        n: x.rows(),
        k: x.cols(),
        matrix,
        trace,
    }
}

/// `ρ = W / tr W`.
pub fn induced_density(w: &WishartSample) -> Result<DensityMatrix> {
    let n = w.n;
    if n == 1 {
        // The only 1x1 density matrix.
        if !(w.trace > 0.0) {
            return Err(Error::Degenerate(format!("Wishart trace {}", w.trace)));
        }
        let rho = DensityMatrix {
            matrix: ComplexMatrix::from_parts(1, 1, vec![Complex64::new(1.0, 0.0)]),
            n,
            k: w.k,
        };
        return Ok(rho);
    }
    if !(w.trace > 0.0) || !w.trace.is_finite() {
        return Err(Error::Degenerate(format!(
            "cannot normalise a Wishart matrix with trace {}",
            w.trace
        )));
    }
    let rho = DensityMatrix {
        matrix: w.matrix.scale(1.0 / w.trace),
        n,
        k: w.k,
    };
    #[cfg(debug_assertions)]
    rho.debug_check();
    Ok(rho)
}

/// Partial trace over the environment of the pure state `ψ ∈ C^n ⊗ C^k`,
/// with `ψ_{ij}` stored at index `i·k + j`:
/// `ρ_{ii'} = Σ_j ψ_{ij} conj(ψ_{i'j}) / ‖ψ‖²`.
pub fn reduced_density(psi: &[Complex64], n: usize, k: usize) -> Result<DensityMatrix> {
    if n == 0 || k == 0 {
        return Err(Error::Dimension { rows: n, cols: k });
    }
    if psi.len() != n * k {
        return Err(Error::Shape(format!(
            "state of length {} does not live in C^{n} ⊗ C^{k}",
            psi.len()
        )));
    }
    let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    if !(norm_sqr > 0.0) {
        return Err(Error::Degenerate("zero state vector".into()));
    }
    let m = ComplexMatrix::from_fn(n, n, |i, ip| {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..k {
            acc += psi[i * k + j] * psi[ip * k + j].conj();
        }
        acc / norm_sqr
    })?;
    DensityMatrix::new(m, k)
}

/// One draw from `μ_{n,k}`.
pub fn sample_density_matrix(n: usize, k: usize, rng: &mut RngStream) -> Result<DensityMatrix> {
    let x = sample_ginibre(n, k, rng)?;
    induced_density(&wishart_from_factor(&x))
}

/// Symmetric Dirichlet(α) on `Σ_{n−1}`: independent `Gamma(α, 1)` variates,
/// normalised by their sum.
pub fn sample_dirichlet(n: usize, alpha: f64, rng: &mut RngStream) -> Result<SimplexVector> {
    if n == 0 {
        return Err(Error::Dimension { rows: n, cols: 1 });
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Parameter(format!(
            "Dirichlet parameter must be positive, got {alpha}"
        )));
    }
    let gamma = Gamma::new(alpha, 1.0).map_err(|e| Error::Parameter(e.to_string()))?;
    let g: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
    let total = neumaier_sum(g.iter().copied());
    if !(total > 0.0) {
        return Err(Error::Degenerate(
            "all Gamma variates underflowed to zero".into(),
        ));
    }
    let coords: Vec<f64> = g.iter().map(|x| x / total).collect();
    SimplexVector::new(coords)
}

/// Compensated (Neumaier) summation.
pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
