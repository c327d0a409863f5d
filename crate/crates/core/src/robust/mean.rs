use crate::error::{Error, Result};
use crate::model::mean;

/// Mean of the shortest window of sorted samples holding
/// `⌈(1 − eta − epsilon) n⌉` points.
///
/// With `eta = 0` nothing is trimmed and the plain mean is returned. Ties
/// between equally short windows go to the lowest one.
pub fn robust_mean_1d(samples: &[f64], eta: f64, epsilon: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(eta >= 0.0 && epsilon >= 0.0 && eta + epsilon < 0.5) {
        return Err(Error::invalid(
            "eta",
            format!("need eta, epsilon >= 0 and eta + epsilon < 0.5, got {eta} and {epsilon}"),
        ));
    }
    if eta == 0.0 {
        return Ok(mean(samples));
    }
    let n = samples.len();
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let keep = (((1.0 - eta - epsilon) * n as f64) - 1e-9).ceil().clamp(1.0, n as f64) as usize;
    let mut best = 0;
    let mut best_width = f64::INFINITY;
    for start in 0..=n - keep {
        let width = sorted[start + keep - 1] - sorted[start];
        if width < best_width {
            best_width = width;
            best = start;
        }
    }
    Ok(mean(&sorted[best..best + keep]))
}
