//! Regression from samples on low-dimensional supports: data model, ERM with
//! a ReLU network, k-NN and Nadaraya-Watson baselines, and rate fitting.

mod baselines;
mod dataset;
mod experiment;
mod metrics;
mod train;

use thiserror::Error;

use crate::approx::ApproxError;
use crate::geometry::GeometryError;
use crate::net::NetError;

pub use crate::fit::RateFit;
pub use baselines::{
    cross_validate, cross_validate_knn, cross_validate_nw, default_knn_grid, default_nw_grid,
    fold_assignment, knn_regress, nw_regress, NwPrediction,
};
pub use dataset::{generate_dataset, RegressionDataset};
pub use experiment::{
    dataset_seed, discard_largest, mean_std, run_replication, CellSpec, Method, MethodParams,
    ReplicationOutcome,
};
pub use metrics::{entropy_bound, fit_rate, l2_error, l2_error_of, RateReport};
pub use train::{
    train_erm, TrainConfig, TrainedModel, WeightInit, DEFAULT_BATCH, FULL_BATCH_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegressionError {
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("no data")]
    EmptyData,
    #[error("expected dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("k = {k} is not in 1..={n}")]
    InvalidK { k: usize, n: usize },
    #[error("{folds} folds for only {n} samples")]
    TooManyFolds { folds: usize, n: usize },
    #[error("training loss became non-finite in epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("clip bound {bound} is below the observed |f| = {observed}")]
    ClipBoundTooSmall { bound: f64, observed: f64 },
    #[error("need at least 2 usable (n, error) points, have {0}")]
    TooFewRatePoints(usize),
    #[error(transparent)]
    Approx(#[from] ApproxError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Net(#[from] NetError),
}
