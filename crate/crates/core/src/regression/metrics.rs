use alloc::vec::Vec;

use super::RegressionError;
use crate::approx::HolderTarget;
use crate::fit::{least_squares, RateFit};
use crate::geometry::PointCloud;

/// Monte-Carlo `‖f̂ − f₀‖²` over `points`.
pub fn l2_error<F>(
    predictor: F,
    target: &HolderTarget,
    points: &PointCloud,
) -> Result<f64, RegressionError>
where
    F: Fn(&[f64]) -> Result<f64, RegressionError>,
{
    l2_error_indexed(points, |_, x| predictor(x), target)
}

/// [`l2_error`] for precomputed predictions, one per point.
pub fn l2_error_of(
    predictions: &[f64],
    target: &HolderTarget,
    points: &PointCloud,
) -> Result<f64, RegressionError> {
    if predictions.len() != points.len() {
        return Err(RegressionError::DimensionMismatch {
            expected: points.len(),
            found: predictions.len(),
        });
    }
    l2_error_indexed(points, |i, _| Ok(predictions[i]), target)
}

fn l2_error_indexed<F>(
    points: &PointCloud,
    predictor: F,
    target: &HolderTarget,
) -> Result<f64, RegressionError>
where
    F: Fn(usize, &[f64]) -> Result<f64, RegressionError>,
{
    if points.is_empty() {
        return Err(RegressionError::EmptyData);
    }
    let mut sum = 0.0;
    for (i, x) in points.iter().enumerate() {
        let d = predictor(i, x)? - target.value(x);
        sum += d * d;
    }
    Ok(sum / points.len() as f64)
}

/// Rate fit plus the inputs that had to be left out.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub fit: RateFit,
    /// `(n, error)` pairs with a nonpositive or non-finite entry.
    pub excluded: Vec<(f64, f64)>,
}

/// OLS of `ln error` on `ln n`; the slope is the empirical convergence rate.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateReport, RegressionError> {
    let (good, excluded): (Vec<(f64, f64)>, Vec<(f64, f64)>) = points
        .iter()
        .copied()
        .partition(|&(n, e)| n > 0.0 && e > 0.0 && n.is_finite() && e.is_finite());
    let remaining = good.len();
    let fit = least_squares(
        good.into_iter()
            .map(|(n, e)| (libm::log(n), libm::log(e)))
            .collect(),
    )
    .ok_or(RegressionError::TooFewRatePoints(remaining))?;
    Ok(RateReport { fit, excluded })
}

/// `W·ln(2 L B^L (W+1)^L / ε)`, evaluated in log form.
pub fn entropy_bound(w: f64, l: f64, b: f64, epsilon: f64) -> Result<f64, RegressionError> {
    if !(w >= 1.0 && l >= 1.0 && b > 0.0 && epsilon > 0.0)
        || ![w, l, b, epsilon].iter().all(|v| v.is_finite())
    {
        return Err(RegressionError::InvalidArgument(
            "entropy bound needs W >= 1, L >= 1, B > 0 and epsilon > 0",
        ));
    }
    Ok(
        w * (core::f64::consts::LN_2 + libm::log(l) + l * libm::log(b) + l * libm::log(w + 1.0)
            - libm::log(epsilon)),
    )
}
