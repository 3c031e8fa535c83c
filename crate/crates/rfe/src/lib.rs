//! Monte Carlo verification, file formats and the `rfe` command line for
//! randomized Fourier phase estimation. The estimator itself lives in
//! [`rfe_core`].

pub mod cli;
pub mod error;
pub mod formats;
pub mod harness;
pub mod suites;

pub use error::{Error, Result};
