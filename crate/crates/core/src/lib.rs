//! Constructive ReLU approximation for functions observed on intrinsically
//! low-dimensional supports.
//!
//! The crate is `no_std` (it needs `alloc`) and has no IO. It covers:
//!
//! - [`net`]: dense ReLU networks, their realization and the `(W, L, B)`
//!   complexity triple (nonzero parameters, layers, largest absolute entry).
//! - [`calculus`]: network combinators (concatenation, parallelization,
//!   identity, max, cut, clip, filter and group-sum networks) with exact
//!   functional semantics.
//! - [`approx`]: Hölder targets, Taylor expansion, sawtooth multiplication
//!   networks and the cube-wise approximator builder.
//! - [`geometry`]: grid covers, box-counting dimension, the cover partition and
//!   support generators (spheres, Koch curve, lp-ball unions).
//! - [`estimators`]: local-PCA and maximum-likelihood intrinsic dimension
//!   estimators and an IDX decoder.
//! - [`regression`]: the regression model, ERM training with Adam, k-NN and
//!   Nadaraya-Watson baselines, cross-validation and rate fitting.
//!
//! File formats, experiment orchestration and the command line live in the
//! companion `lowdim` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod approx;
pub mod calculus;
pub mod estimators;
pub mod fit;
pub mod geometry;
pub mod net;
pub mod regression;
pub mod seed;

mod error;

pub use error::Error;
pub use geometry::PointCloud;
pub use net::{ComplexityTriple, Layer, Matrix, Network};
