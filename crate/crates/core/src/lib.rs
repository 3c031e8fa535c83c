//! Randomized Fourier estimation (RFE) of an eigenphase from Hadamard-test
//! outcomes.
//!
//! The crate is `no_std` (with `alloc`) and contains only the arithmetic:
//!
//! - [`spectrum`]: the Dirichlet-like kernel, closed-form expected Fourier
//!   coefficients and the close / adjacent / non-adjacent classification.
//! - [`noise`]: algorithm error models that perturb the Hadamard-test biases.
//! - [`hadamard`]: sampling of one real/imaginary Hadamard-test pair.
//! - [`estimator`]: the randomized Fourier estimation loop itself.
//! - [`bounds`]: sample-count and grid-size calculators with their thresholds.
//! - [`seed`]: counter-based seed derivation for reproducible trial campaigns.
//!
//! IO, parallel campaigns and the command line live in the companion `rfe`
//! crate.
//!
//! Phases are accepted anywhere in `[0, 2π)`. The success guarantees from
//! [`bounds`] only hold for phases in `[0, π]`.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod bounds;
mod error;
pub mod estimator;
pub mod hadamard;
mod math;
pub mod noise;
pub mod seed;
pub mod spectrum;

pub use error::Error;
pub use estimator::{estimate_phase, run_rfe, RunConfig, SpectrumEstimate, TrialResult};
pub use noise::{AdversaryStrategy, DeviationTable, NoiseModel};
pub use spectrum::{ExpectedSpectrum, FrequencyClass, Phase};

pub use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;
