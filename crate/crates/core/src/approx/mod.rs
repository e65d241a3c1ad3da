//! Hölder targets and the cube-wise ReLU approximator.

mod builder;
mod mul;
mod poly;
mod simul;
mod target;
mod taylor;

use thiserror::Error;

use crate::calculus::CalculusError;
use crate::geometry::GeometryError;
use crate::net::NetError;

pub use builder::{
    auto_gamma, build_approximator, complexity_slope, cover_constants, rate_sweep,
    verify_sup_error, ApproximatorSpec, BuildOptions, SupError, MAX_BUILD_DIM,
};
pub use mul::{monomial_net, mul_net, product_net, square_net, MulConfig, SquareScheme};
pub use poly::{monomial_basis, pol_error_bound, pol_net, pol_net_with, pol_refinement};
pub use simul::simul_net;
pub use target::{
    builtin_target, BuiltinTarget, Constant, DerivativeFailure, Exponential, HolderTarget,
    MultiIndex, Polynomial, Sim61, Sim62, SinSum, SmoothFunction,
};
pub use taylor::{taylor_expand, TaylorPolynomial};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ApproxError {
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("epsilon {0} is outside the admissible range")]
    InadmissibleEpsilon(f64),
    #[error("support sample is empty")]
    EmptySupport,
    #[error("expected dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{cubes} cubes but the polynomial network has {outputs} outputs")]
    ArityMismatch { cubes: usize, outputs: usize },
    #[error("ambient dimension {0} is too large for the cube-wise builder")]
    DimensionTooLarge(usize),
    #[error("derivative oracle failed: {0}")]
    Derivative(DerivativeFailure),
    #[error("unknown target tag (expected sim61 or sim62)")]
    UnknownTarget,
    #[error("sup error {achieved} still above {epsilon} after {attempts} attempts")]
    NotConverged {
        epsilon: f64,
        achieved: f64,
        attempts: u32,
    },
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
