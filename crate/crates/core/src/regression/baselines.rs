use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{RegressionDataset, RegressionError};
use crate::geometry::{k_nearest, squared_distance, PointCloud};

/// Mean response of the `k` nearest training points (Euclidean, ties to the
/// lower index).
pub fn knn_regress(
    train: &RegressionDataset,
    k: usize,
    queries: &PointCloud,
) -> Result<Vec<f64>, RegressionError> {
    if k == 0 || k > train.len() {
        return Err(RegressionError::InvalidK { k, n: train.len() });
    }
    check_query_dim(train, queries)?;
    Ok(queries
        .iter()
        .map(|q| {
            k_nearest(&train.x, q, k, None)
                .iter()
                .map(|&(_, i)| train.y[i])
                .sum::<f64>()
                / k as f64
        })
        .collect())
}

fn check_query_dim(train: &RegressionDataset, queries: &PointCloud) -> Result<(), RegressionError> {
    if queries.dim() != train.dim() {
        return Err(RegressionError::DimensionMismatch {
            expected: train.dim(),
            found: queries.dim(),
        });
    }
    if train.is_empty() {
        return Err(RegressionError::EmptyData);
    }
    Ok(())
}

/// Nadaraya-Watson predictions; `fallback[i]` marks queries whose kernel
/// weights all underflowed and that took the 1-NN response instead.
#[derive(Debug, Clone, PartialEq)]
pub struct NwPrediction {
    pub values: Vec<f64>,
    pub fallback: Vec<bool>,
}

impl NwPrediction {
    pub fn fallback_count(&self) -> usize {
        self.fallback.iter().filter(|&&f| f).count()
    }
}

/// `Σ K(‖x−Xᵢ‖/h) Yᵢ / Σ K(‖x−Xᵢ‖/h)` with `K(u) = exp(−u²/2)`.
pub fn nw_regress(
    train: &RegressionDataset,
    bandwidth: f64,
    queries: &PointCloud,
) -> Result<NwPrediction, RegressionError> {
    if !(bandwidth > 0.0) || !bandwidth.is_finite() {
        return Err(RegressionError::InvalidArgument(
            "bandwidth must be positive",
        ));
    }
    check_query_dim(train, queries)?;
    let inv = 1.0 / (2.0 * bandwidth * bandwidth);
    let mut values = Vec::with_capacity(queries.len());
    let mut fallback = Vec::with_capacity(queries.len());
    for q in queries.iter() {
        let (mut num, mut den) = (0.0, 0.0);
        for (x, &y) in train.x.iter().zip(&train.y) {
            let w = libm::exp(-squared_distance(x, q) * inv);
            num += w * y;
            den += w;
        }
        if den > 0.0 && den.is_finite() {
            values.push(num / den);
            fallback.push(false);
        } else {
            let nearest = k_nearest(&train.x, q, 1, None)[0].1;
            values.push(train.y[nearest]);
            fallback.push(true);
        }
    }
    Ok(NwPrediction { values, fallback })
}

/// Fold membership from a seeded shuffle of `0..n`: position `p` of the
/// shuffled order goes to fold `p mod folds`.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold = alloc::vec![0; n];
    for (p, &i) in order.iter().enumerate() {
        fold[i] = p % folds;
    }
    fold
}

/// Cross-validated choice among `grid`: the value with the smallest mean
/// squared held-out error, ties to the smallest value. `predict` returns
/// `Ok(None)` for values that do not apply to a fold (e.g. `k` above the
/// fold's training size); such values are skipped.
pub fn cross_validate<F>(
    train: &RegressionDataset,
    grid: &[f64],
    folds: usize,
    seed: u64,
    mut predict: F,
) -> Result<f64, RegressionError>
where
    F: FnMut(&RegressionDataset, f64, &PointCloud) -> Result<Option<Vec<f64>>, RegressionError>,
{
    if grid.is_empty() {
        return Err(RegressionError::InvalidArgument(
            "empty hyper-parameter grid",
        ));
    }
    if folds < 2 {
        return Err(RegressionError::InvalidArgument("need at least 2 folds"));
    }
    if folds > train.len() {
        return Err(RegressionError::TooManyFolds {
            folds,
            n: train.len(),
        });
    }
    let assignment = fold_assignment(train.len(), folds, seed);
    let splits: Vec<(RegressionDataset, RegressionDataset)> = (0..folds)
        .map(|f| {
            let (held, kept): (Vec<usize>, Vec<usize>) =
                (0..train.len()).partition(|&i| assignment[i] == f);
            (train.subset(&kept), train.subset(&held))
        })
        .collect();

    let mut sorted: Vec<f64> = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best: Option<(f64, f64)> = None;
    'grid: for &value in &sorted {
        let mut sse = 0.0;
        for (fit, held) in &splits {
            let Some(pred) = predict(fit, value, &held.x)? else {
                continue 'grid;
            };
            sse += pred
                .iter()
                .zip(&held.y)
                .map(|(p, y)| (p - y) * (p - y))
                .sum::<f64>();
        }
        let mse = sse / train.len() as f64;
        if best.is_none_or(|(b, _)| mse < b) {
            best = Some((mse, value));
        }
    }
    best.map(|b| b.1).ok_or(RegressionError::InvalidArgument(
        "no grid value applies to every fold",
    ))
}

/// `k ∈ 1..=50`.
pub fn default_knn_grid() -> Vec<f64> {
    (1..=50).map(f64::from).collect()
}

/// `h ∈ {0.10, 0.11, …, 1.00}`.
pub fn default_nw_grid() -> Vec<f64> {
    (10..=100).map(|i| f64::from(i) / 100.0).collect()
}

/// [`cross_validate`] for k-NN; `k` larger than a fold's training set is
/// skipped.
pub fn cross_validate_knn(
    train: &RegressionDataset,
    grid: &[f64],
    folds: usize,
    seed: u64,
) -> Result<usize, RegressionError> {
    let k = cross_validate(train, grid, folds, seed, |fit, k, q| {
        let k = k as usize;
        if k == 0 || k > fit.len() {
            return Ok(None);
        }
        knn_regress(fit, k, q).map(Some)
    })?;
    Ok(k as usize)
}

pub fn cross_validate_nw(
    train: &RegressionDataset,
    grid: &[f64],
    folds: usize,
    seed: u64,
) -> Result<f64, RegressionError> {
    cross_validate(train, grid, folds, seed, |fit, h, q| {
        nw_regress(fit, h, q).map(|p| Some(p.values))
    })
}
