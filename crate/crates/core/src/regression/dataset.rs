use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::RegressionError;
use crate::approx::HolderTarget;
use crate::geometry::{generate_support, PointCloud, SupportKind};

/// Samples `Yᵢ = f₀(Xᵢ) + ξᵢ` with `ξᵢ ~ N(0, σ²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionDataset {
    pub x: PointCloud,
    pub y: Vec<f64>,
    pub sigma2: f64,
    pub seed: u64,
    pub support: SupportKind,
}

impl RegressionDataset {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            x: self.x.select(indices),
            y: indices.iter().map(|&i| self.y[i]).collect(),
            sigma2: self.sigma2,
            seed: self.seed,
            support: self.support,
        }
    }
}

/// Draws `n` design points from `support` and noisy responses of `target`.
/// The design uses `seed` directly; the noise uses a stream derived from it.
pub fn generate_dataset(
    target: &HolderTarget,
    support: SupportKind,
    n: usize,
    sigma2: f64,
    seed: u64,
) -> Result<RegressionDataset, RegressionError> {
    if !(sigma2 >= 0.0) || !sigma2.is_finite() {
        return Err(RegressionError::InvalidArgument(
            "sigma2 must be nonnegative",
        ));
    }
    if support.ambient_dim() != target.dim() {
        return Err(RegressionError::DimensionMismatch {
            expected: target.dim(),
            found: support.ambient_dim(),
        });
    }
    let x = generate_support(support, n, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(crate::seed::derive_seed(seed, &[0x6e6f_6973_65]));
    let noise = Normal::new(0.0, libm::sqrt(sigma2)).expect("finite standard deviation");
    let y = x
        .iter()
        .map(|p| {
            let f = target.value(p);
            if sigma2 == 0.0 {
                f
            } else {
                f + noise.sample(&mut rng)
            }
        })
        .collect();
    Ok(RegressionDataset {
        x,
        y,
        sigma2,
        seed,
        support,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::builtin_target;

    #[test]
    fn noiseless_responses_are_exact() {
        let t = builtin_target("sim62", 5).unwrap();
        let kind = SupportKind::LpBallUnion { d: 2, dim: 5 };
        let ds = generate_dataset(&t, kind, 50, 0.0, 4).unwrap();
        for (x, y) in ds.x.iter().zip(&ds.y) {
            assert_eq!(*y, t.value(x));
        }
        let noisy = generate_dataset(&t, kind, 50, 0.1, 4).unwrap();
        assert_eq!(noisy.x, ds.x);
        assert_ne!(noisy.y, ds.y);
        assert!(generate_dataset(&t, kind, 50, -1.0, 4).is_err());
    }
}
