use alloc::vec::Vec;

use super::{grid_cover, GeometryError, PointCloud};
use crate::fit::{least_squares, RateFit};

/// Box-counting estimate with the per-scale counts it was fitted on.
#[derive(Debug, Clone, PartialEq)]
pub struct DimEstimate {
    pub value: f64,
    /// `(γ, N(γ))` in the order the scales were given.
    pub scales: Vec<(f64, usize)>,
    /// Fit of `ln N` on `ln(1/γ)`.
    pub fit: RateFit,
    /// Set when every scale sees a single cell, so the slope carries no
    /// information.
    pub low_confidence: bool,
}

/// Slope of `ln N(γ)` against `ln(1/γ)` over grid covers at `scales`.
pub fn minkowski_dim(points: &PointCloud, scales: &[f64]) -> Result<DimEstimate, GeometryError> {
    if scales.len() < 3 {
        return Err(GeometryError::TooFewScales(scales.len()));
    }
    if scales.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(GeometryError::ScalesNotDecreasing);
    }
    let mut counts = Vec::with_capacity(scales.len());
    for &gamma in scales {
        counts.push((gamma, grid_cover(points, gamma)?.len()));
    }
    let fit = least_squares(
        counts
            .iter()
            .map(|&(g, n)| (-libm::log(g), libm::log(n as f64)))
            .collect(),
    )
    .expect("strictly decreasing scales give distinct abscissae");
    Ok(DimEstimate {
        value: fit.slope,
        low_confidence: counts.iter().all(|&(_, n)| n == 1),
        scales: counts,
        fit,
    })
}
