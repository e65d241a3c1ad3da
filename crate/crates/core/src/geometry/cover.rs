use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::{GeometryError, PointCloud};

/// Occupied cells of the side-`gamma` grid anchored at the origin.
///
/// Cells are kept in lexicographic order of their integer coordinates; that
/// order is the index map `ψ` (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct HypercubeCover {
    gamma: f64,
    dim: usize,
    cells: Vec<Vec<u32>>,
}

/// Number of grid cells per axis, `⌈1/γ⌉`, forgiving rounding noise in `1/γ`.
pub(crate) fn cells_per_axis(gamma: f64) -> u32 {
    let r = 1.0 / gamma;
    let nearest = libm::round(r);
    let n = if (r - nearest).abs() < 1e-9 {
        nearest
    } else {
        libm::ceil(r)
    };
    n.max(1.0) as u32
}

fn cell_index(v: f64, gamma: f64, per_axis: u32) -> u32 {
    let i = libm::floor(v / gamma);
    if i <= 0.0 {
        0
    } else {
        (i as u32).min(per_axis - 1)
    }
}

impl HypercubeCover {
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Vec<u32>] {
        &self.cells
    }

    pub fn cell(&self, index: usize) -> &[u32] {
        &self.cells[index]
    }

    /// `ψ(cell)`, if the cell is occupied.
    pub fn index_of(&self, cell: &[u32]) -> Option<usize> {
        self.cells.binary_search_by(|c| c.as_slice().cmp(cell)).ok()
    }

    /// Grid cell containing `x`; points on the upper boundary `1` fall into
    /// the last cell.
    pub fn cell_of(&self, x: &[f64]) -> Vec<u32> {
        let per_axis = cells_per_axis(self.gamma);
        x.iter()
            .map(|&v| cell_index(v, self.gamma, per_axis))
            .collect()
    }

    /// Geometric center `(c + 1/2)·γ` of cell `index`.
    pub fn center(&self, index: usize) -> Vec<f64> {
        self.cells[index]
            .iter()
            .map(|&c| (c as f64 + 0.5) * self.gamma)
            .collect()
    }
}

/// Occupied grid cells of side `gamma` for a nonempty cloud in `[0,1]^D`.
pub fn grid_cover(points: &PointCloud, gamma: f64) -> Result<HypercubeCover, GeometryError> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(GeometryError::InvalidGamma(gamma));
    }
    if points.is_empty() {
        return Err(GeometryError::Empty);
    }
    points.check_unit_cube()?;
    let per_axis = cells_per_axis(gamma);
    let set: BTreeSet<Vec<u32>> = points
        .iter()
        .map(|x| x.iter().map(|&v| cell_index(v, gamma, per_axis)).collect())
        .collect();
    Ok(HypercubeCover {
        gamma,
        dim: points.dim(),
        cells: set.into_iter().collect(),
    })
}

/// Max-norm distance between two closed grid cubes of side `gamma`.
pub fn set_distance(a: &[u32], b: &[u32], gamma: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let gap = x.abs_diff(y) as f64 - 1.0;
            if gap > 0.0 {
                gamma * gap
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

/// Disjoint groups of cube indices whose members are pairwise at least `γ`
/// apart.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverPartition {
    pub groups: Vec<Vec<usize>>,
}

impl CoverPartition {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

fn separated(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).any(|(&x, &y)| x.abs_diff(y) >= 2)
}

/// Greedy split of a cover: each round scans the remaining cubes in `ψ` order
/// and keeps every cube that is at least `γ` away from the ones already kept.
///
/// A cube conflicts only with its `3^D − 1` grid neighbours and each round
/// that skips it removes one of them, so there are at most `3^D` groups.
pub fn partition_cover(cover: &HypercubeCover) -> CoverPartition {
    let mut remaining: Vec<usize> = (0..cover.len()).collect();
    let mut groups = Vec::new();
    while !remaining.is_empty() {
        let mut group: Vec<usize> = Vec::new();
        let mut rest = Vec::new();
        for idx in remaining {
            let cell = cover.cell(idx);
            if group.iter().all(|&g| separated(cover.cell(g), cell)) {
                group.push(idx);
            } else {
                rest.push(idx);
            }
        }
        groups.push(group);
        remaining = rest;
    }
    CoverPartition { groups }
}
