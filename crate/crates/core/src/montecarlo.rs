//! Seeded, parallel Monte Carlo driver.
//!
//! Draw `i` always reads from `RngStream::new(master_seed, i)`, and results are
//! returned in draw order, so every reduction over them is independent of the
//! number of workers.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::sampling::neumaier_sum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Evaluates `draw(i, stream_i)` for `i in 0..samples` on `workers` threads.
pub fn run_draws<T, F>(master_seed: u64, samples: usize, workers: usize, draw: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut RngStream) -> Result<T> + Sync,
{
    if workers == 0 {
        return Err(Error::Usage("worker count must be positive".into()));
    }
    let one = |i: usize| {
        let index = i as u64;
        draw(index, &mut RngStream::new(master_seed, index))
    };
    if workers == 1 {
        return (0..samples).map(one).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..samples).into_par_iter().map(one).collect())
}

/// Sample mean and unbiased variance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    /// `sqrt(variance / count)`.
    pub std_error: f64,
}

impl Summary {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let count = values.len();
        if count < 2 {
            return Err(Error::Usage(format!(
                "summary needs at least two values, got {count}"
            )));
        }
        let mean = neumaier_sum(values.iter().copied()) / count as f64;
        let ss = neumaier_sum(values.iter().map(|v| (v - mean) * (v - mean)));
        let variance = ss / (count - 1) as f64;
        Ok(Self {
            count,
            mean,
            variance,
            std_error: (variance / count as f64).sqrt(),
        })
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    /// `|mean − target| / std_error`; infinite when the error is zero and the
    /// mean is off target.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.mean - target).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

/// Pearson correlation of paired samples.
pub fn pearson_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Usage(
            "correlation needs two equally long samples of length >= 2".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = neumaier_sum(x.iter().copied()) / n;
    let my = neumaier_sum(y.iter().copied()) / n;
    let sxy = neumaier_sum(x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)));
    let sxx = neumaier_sum(x.iter().map(|a| (a - mx) * (a - mx)));
    let syy = neumaier_sum(y.iter().map(|b| (b - my) * (b - my)));
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("correlation of a constant sample".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Median of a non-empty sample (mean of the two middle values when even).
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Usage("median of an empty sample".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Ok(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn results_do_not_depend_on_workers() {
        let f = |i: u64, rng: &mut RngStream| Ok((i, rng.uniform(), rng.complex_normal()));
        let one = run_draws(11, 200, 1, f).unwrap();
        let four = run_draws(11, 200, 4, f).unwrap();
        assert_eq!(one, four);
        assert!(one.iter().enumerate().all(|(i, r)| r.0 == i as u64));
        assert!(run_draws(11, 3, 0, f).is_err());
    }

    #[test]
    fn errors_propagate() {
        let r: Result<Vec<()>> = run_draws(1, 10, 2, |i, _| {
            if i == 7 {
                Err(Error::Numerical("boom".into()))
            } else {
                Ok(())
            }
        });
        assert!(r.is_err());
    }

    #[test]
    fn summary_statistics() {
        let s = Summary::from_values(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        assert_abs_diff_eq!(s.variance, 5.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.std_error, (5.0f64 / 12.0).sqrt(), epsilon = 1e-15);
        assert_eq!(s.z_score(2.5), 0.0);
        assert!(Summary::from_values(&[1.0]).is_err());
    }

    #[test]
    fn correlation_and_median() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_abs_diff_eq!(
            pearson_correlation(&x, &[2.0, 4.0, 6.0, 8.0]).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            pearson_correlation(&x, &[4.0, 3.0, 2.0, 1.0]).unwrap(),
            -1.0,
            epsilon = 1e-15
        );
        assert!(pearson_correlation(&x, &[1.0; 4]).is_err());
        assert_eq!(median(&[3.0, 1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]).unwrap(), 2.5);
    }
}
