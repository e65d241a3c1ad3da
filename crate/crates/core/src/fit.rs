//! Ordinary least squares on `(x, y)` pairs.

use alloc::vec::Vec;

/// Straight-line fit `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination, clamped to `[0, 1]`. A perfect fit and a
    /// constant response both give 1.
    pub r_squared: f64,
    /// The fitted `(x, y)` pairs, usually logarithms.
    pub points: Vec<(f64, f64)>,
}

/// Least-squares line through `points`. `None` with fewer than two points or
/// when all `x` coincide.
pub fn least_squares(points: Vec<(f64, f64)>) -> Option<RateFit> {
    let n = points.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Some(RateFit {
        slope,
        intercept,
        r_squared,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn exact_line() {
        let f = least_squares(vec![(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-15);
        assert!((f.intercept - 1.0).abs() < 1e-15);
        assert!((f.r_squared - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(least_squares(vec![(1.0, 1.0)]).is_none());
        assert!(least_squares(vec![(1.0, 1.0), (1.0, 2.0)]).is_none());
    }
}
