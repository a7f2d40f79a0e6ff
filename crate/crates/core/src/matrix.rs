use crate::error::{Error, Result};
use faer::linalg::matmul::triangular::{matmul, BlockStructure};
use faer::{Accum, Mat, MatRef, Par};
use num_complex::Complex64;

/// Dense complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build from row-major entries. Rejects empty shapes, a length mismatch
    /// and non-finite entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_dims(rows, cols)?;
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Parameter("matrix has non-finite entries".into()));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Real row-major entries, a convenience for tests and small examples.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self> {
        check_dims(rows, cols)?;
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::from_fn(values.len(), values.len(), |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Internal constructor for already validated storage.
    pub(crate) fn from_parts(rows: usize, cols: usize, entries: Vec<Complex64>) -> Self {
        debug_assert_eq!(entries.len(), rows * cols);
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Sum of the diagonal entries.
    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    pub fn adjoint(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).conj());
            }
        }
        Self::from_parts(self.cols, self.rows, entries)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_parts(
            self.rows,
            self.cols,
            self.entries.iter().map(|z| z * factor).collect(),
        )
    }

    /// `‖M − M*‖_F / max(1, ‖M‖_F)`; zero for an exactly Hermitian matrix.
    pub fn hermitian_deviation(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut dev = 0.0;
        for i in 0..n {
            for j in i..n {
                let d = self.get(i, j) - self.get(j, i).conj();
                dev += if i == j {
                    d.norm_sqr()
                } else {
                    2.0 * d.norm_sqr()
                };
            }
        }
        Ok(dev.sqrt() / self.frobenius_norm().max(1.0))
    }

    /// Plain product `self · rhs`.
    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let prod = self.as_faer() * rhs.as_faer();
        Ok(Self::from_faer(prod.as_ref()))
    }

    /// `X · X*` with only the lower triangle computed; the upper triangle is
    /// its mirror and the diagonal is real, so the result is exactly Hermitian.
    pub fn gram(&self) -> Self {
        let n = self.rows;
        let x = self.as_faer();
        let mut w = Mat::<Complex64>::zeros(n, n);
        matmul(
            w.as_mut(),
            BlockStructure::TriangularLower,
            Accum::Replace,
            x,
            BlockStructure::Rectangular,
            x.adjoint(),
            BlockStructure::Rectangular,
            Complex64::new(1.0, 0.0),
            Par::Seq,
        );
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            entries[j * n + j] = Complex64::new(w[(j, j)].re, 0.0);
            for i in j + 1..n {
                let z = w[(i, j)];
                entries[i * n + j] = z;
                entries[j * n + i] = z.conj();
            }
        }
        Self::from_parts(n, n, entries)
    }

    /// Zero-copy faer view of the row-major storage.
    pub fn as_faer(&self) -> MatRef<'_, Complex64> {
        MatRef::from_row_major_slice(&self.entries, self.rows, self.cols)
    }

    pub fn from_faer(m: MatRef<'_, Complex64>) -> Self {
        let (rows, cols) = (m.nrows(), m.ncols());
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(m[(i, j)]);
            }
        }
        Self::from_parts(rows, cols, entries)
    }
}

fn check_dims(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        Err(Error::Dimension { rows, cols })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            ComplexMatrix::new(0, 3, vec![]),
            Err(Error::Dimension { rows: 0, cols: 3 })
        ));
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![c(1.0, 0.0); 3]),
            Err(Error::Shape(_))
        ));
        assert!(ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn gram_matches_full_product() {
        let x = ComplexMatrix::from_fn(3, 5, |i, j| c(i as f64 - j as f64, (i * j) as f64 * 0.5))
            .unwrap();
        let w = x.gram();
        let full = x.matmul(&x.adjoint()).unwrap();
        for (a, b) in w.entries().iter().zip(full.entries()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert_eq!(w.hermitian_deviation().unwrap(), 0.0);
    }

    #[test]
    fn hermitian_deviation_detects_asymmetry() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(m.hermitian_deviation().unwrap() > 0.5);
        let h = ComplexMatrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(0.0, 2.0), c(0.0, -2.0), c(3.0, 0.0)],
        )
        .unwrap();
        assert_eq!(h.hermitian_deviation().unwrap(), 0.0);
        assert!(ComplexMatrix::from_real(1, 2, &[1.0, 2.0])
            .unwrap()
            .hermitian_deviation()
            .is_err());
    }

    #[test]
    fn trace_and_norm() {
        let m = ComplexMatrix::diagonal(&[1.0, 3.0]).unwrap();
        assert_eq!(m.trace(), c(4.0, 0.0));
        assert_eq!(m.frobenius_norm_sqr(), 10.0);
    }
}
