//! Point clouds in `[0,1]^D`, grid covers, box-counting dimension and support
//! generators.

mod cover;
mod dimension;
mod neighbors;
mod support;

use alloc::vec::Vec;

use thiserror::Error;

pub use cover::{grid_cover, partition_cover, set_distance, CoverPartition, HypercubeCover};
pub use dimension::{minkowski_dim, DimEstimate};
pub use neighbors::k_nearest;
pub(crate) use neighbors::squared_distance;
pub use support::{generate_support, koch_polyline, SupportKind, DEFAULT_KOCH_LEVEL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("point cloud is empty")]
    Empty,
    #[error("point {index} has coordinate {value} outside [0, 1]")]
    OutsideUnitCube { index: usize, value: f64 },
    #[error("data of length {len} is not a multiple of dimension {dim}")]
    Ragged { len: usize, dim: usize },
    #[error("gamma must lie in (0, 1], got {0}")]
    InvalidGamma(f64),
    #[error("need at least 3 scales, got {0}")]
    TooFewScales(usize),
    #[error("scales must be strictly decreasing")]
    ScalesNotDecreasing,
    #[error("intrinsic dimension {d} does not fit in ambient dimension {dim}")]
    DimTooLarge { d: usize, dim: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

/// `n` points in `ℝ^D`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    data: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self, GeometryError> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(GeometryError::Ragged {
                len: data.len(),
                dim,
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, GeometryError> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(GeometryError::Ragged { len: r.len(), dim });
        }
        Self::new(dim, rows.iter().flatten().copied().collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> core::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.data
    }

    /// Checks that every coordinate lies in `[0, 1]`.
    pub fn check_unit_cube(&self) -> Result<(), GeometryError> {
        match self.data.iter().position(|v| !(0.0..=1.0).contains(v)) {
            Some(i) => Err(GeometryError::OutsideUnitCube {
                index: i / self.dim,
                value: self.data[i],
            }),
            None => Ok(()),
        }
    }

    /// Rows at the given indices, in that order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            data.extend_from_slice(self.point(i));
        }
        Self {
            dim: self.dim,
            data,
        }
    }
}
