pub mod density;
pub mod edge;
pub mod firstmodel;
pub mod moments;
pub mod mp;
pub mod sample;

use densmat::montecarlo::Summary;

/// Mean and standard error; the error is NaN for fewer than two values.
pub(crate) fn mean_and_error(values: &[f64]) -> (f64, f64) {
    match Summary::from_values(values) {
        Ok(s) => (s.mean, s.std_error),
        Err(_) => (values.iter().sum::<f64>() / values.len() as f64, f64::NAN),
    }
}

/// `|mean − target| / se`, zero when the mean is exactly on target.
pub(crate) fn z_score(mean: f64, se: f64, target: f64) -> f64 {
    let d = (mean - target).abs();
    if d == 0.0 {
        0.0
    } else {
        d / se
    }
}
