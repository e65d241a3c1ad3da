//! File formats, experiment orchestration and plotting on top of
//! [`lowdim_core`], plus the `lowdim` command line.

pub use lowdim_core as core;

pub mod config;
pub mod io;
pub mod plot;
pub mod runner;

mod error;

pub use error::{Error, Result};
