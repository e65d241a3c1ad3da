//! Pointwise intrinsic-dimension estimators and an IDX decoder.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

use crate::geometry::{k_nearest, GeometryError, PointCloud};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("need at least {needed} points, got {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("every point coincides with its neighbours; no estimate possible")]
    Degenerate,
    #[error("bad IDX magic number {0:#010x} (expected 0x00000803)")]
    BadMagic(u32),
    #[error("IDX data truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub const DEFAULT_K: usize = 10;
pub const DEFAULT_VARIANCE_THRESHOLD: f64 = 0.95;

/// Local dimension at every anchor: the smallest `m` whose top `m`
/// eigenvalues of the covariance of the anchor and its `k` nearest
/// neighbours explain at least `threshold` of the variance.
pub fn lpca_local_dims(
    points: &PointCloud,
    k: usize,
    threshold: f64,
) -> Result<Vec<usize>, EstimatorError> {
    if k == 0 {
        return Err(EstimatorError::InvalidArgument("k must be positive"));
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(EstimatorError::InvalidArgument(
            "threshold must lie in (0, 1]",
        ));
    }
    if points.len() < k + 1 {
        return Err(EstimatorError::TooFewPoints {
            needed: k + 1,
            found: points.len(),
        });
    }
    let dim = points.dim();
    let mut dims = Vec::with_capacity(points.len());
    for (i, anchor) in points.iter().enumerate() {
        let mut idx: Vec<usize> = k_nearest(points, anchor, k, Some(i))
            .into_iter()
            .map(|p| p.1)
            .collect();
        idx.push(i);
        let n = idx.len() as f64;
        let mut mean = alloc::vec![0.0; dim];
        for &j in &idx {
            for (m, v) in mean.iter_mut().zip(points.point(j)) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut cov = DMatrix::<f64>::zeros(dim, dim);
        for &j in &idx {
            let p = points.point(j);
            for a in 0..dim {
                let da = p[a] - mean[a];
                for b in a..dim {
                    cov[(a, b)] += da * (p[b] - mean[b]) / n;
                }
            }
        }
        for a in 0..dim {
            for b in 0..a {
                cov[(a, b)] = cov[(b, a)];
            }
        }
        let mut eig: Vec<f64> = SymmetricEigen::new(cov)
            .eigenvalues
            .iter()
            .map(|v| v.max(0.0))
            .collect();
        eig.sort_unstable_by(|a, b| b.total_cmp(a));
        let total: f64 = eig.iter().sum();
        let local = if total <= 0.0 {
            0
        } else {
            let mut acc = 0.0;
            let mut m = eig.len();
            for (c, v) in eig.iter().enumerate() {
                acc += v;
                if acc >= threshold * total * (1.0 - 1e-12) {
                    m = c + 1;
                    break;
                }
            }
            m
        };
        dims.push(local);
    }
    Ok(dims)
}

/// Median (lower median for even counts) of [`lpca_local_dims`].
pub fn lpca_dim(points: &PointCloud, k: usize, threshold: f64) -> Result<usize, EstimatorError> {
    let mut dims = lpca_local_dims(points, k, threshold)?;
    dims.sort_unstable();
    Ok(dims[(dims.len() - 1) / 2])
}

/// Result of [`ml_dim`].
#[derive(Debug, Clone, PartialEq)]
pub struct MlEstimate {
    pub value: f64,
    /// Points that contributed a finite local estimate.
    pub used_points: usize,
    /// Neighbour pairs at distance zero that were left out.
    pub excluded_pairs: usize,
    /// Points dropped because fewer than two distinct neighbour distances
    /// remained.
    pub skipped_points: usize,
}

impl MlEstimate {
    pub fn has_warnings(&self) -> bool {
        self.excluded_pairs > 0 || self.skipped_points > 0
    }
}

/// Levina-Bickel estimate: the mean over points of
/// `[(k−1)⁻¹ Σ_{j<k} ln(T_k/T_j)]⁻¹`, with `T_j` the distance to the `j`-th
/// nearest neighbour. Neighbours at distance zero are excluded and counted.
pub fn ml_dim(points: &PointCloud, k: usize) -> Result<MlEstimate, EstimatorError> {
    if k < 3 {
        return Err(EstimatorError::InvalidArgument("k must be at least 3"));
    }
    if points.len() < k + 1 {
        return Err(EstimatorError::TooFewPoints {
            needed: k + 1,
            found: points.len(),
        });
    }
    let mut sum = 0.0;
    let mut used = 0usize;
    let mut excluded = 0usize;
    let mut skipped = 0usize;
    let n = points.len();
    for (i, x) in points.iter().enumerate() {
        let mut want = k;
        let (near, zeros) = loop {
            let near = k_nearest(points, x, want, Some(i));
            let zeros = near.iter().take_while(|p| p.0 == 0.0).count();
            if near.len() - zeros >= k || want >= n - 1 {
                break (near, zeros);
            }
            want = (k + zeros).max(2 * want).min(n - 1);
        };
        excluded += zeros.min(k);
        let dists: Vec<f64> = near[zeros..]
            .iter()
            .take(k)
            .map(|p| libm::sqrt(p.0))
            .collect();
        if dists.len() < 2 {
            skipped += 1;
            continue;
        }
        let tk = dists[dists.len() - 1];
        let s: f64 = dists[..dists.len() - 1]
            .iter()
            .map(|t| libm::log(tk / t))
            .sum::<f64>()
            / (dists.len() - 1) as f64;
        if s <= 0.0 {
            skipped += 1;
            continue;
        }
        sum += 1.0 / s;
        used += 1;
    }
    if used == 0 {
        return Err(EstimatorError::Degenerate);
    }
    Ok(MlEstimate {
        value: sum / used as f64,
        used_points: used,
        excluded_pairs: excluded,
        skipped_points: skipped,
    })
}

const IDX_MAGIC: u32 = 0x0000_0803;

/// Decodes an IDX file of unsigned-byte images (magic `0x00000803`) into a
/// cloud with one row per image, each pixel scaled by `1/255`.
pub fn parse_idx(bytes: &[u8]) -> Result<PointCloud, EstimatorError> {
    let word = |at: usize| -> Result<u32, EstimatorError> {
        bytes
            .get(at..at + 4)
            .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
            .ok_or(EstimatorError::Truncated {
                expected: at + 4,
                found: bytes.len(),
            })
    };
    let magic = word(0)?;
    if magic != IDX_MAGIC {
        return Err(EstimatorError::BadMagic(magic));
    }
    let count = word(4)? as usize;
    let rows = word(8)? as usize;
    let cols = word(12)? as usize;
    let dim = rows * cols;
    if dim == 0 || count == 0 {
        return Err(EstimatorError::InvalidArgument("IDX file holds no pixels"));
    }
    let expected = 16 + count * dim;
    if bytes.len() < expected {
        return Err(EstimatorError::Truncated {
            expected,
            found: bytes.len(),
        });
    }
    let data = bytes[16..expected]
        .iter()
        .map(|&b| f64::from(b) / 255.0)
        .collect();
    Ok(PointCloud::new(dim, data)?)
}
