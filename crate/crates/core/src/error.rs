use thiserror::Error;

use crate::approx::ApproxError;
use crate::calculus::CalculusError;
use crate::estimators::EstimatorError;
use crate::geometry::GeometryError;
use crate::net::NetError;
use crate::regression::RegressionError;

/// Any error raised by this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Approx(#[from] ApproxError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Regression(#[from] RegressionError),
}
