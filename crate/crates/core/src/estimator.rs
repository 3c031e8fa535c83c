//! Randomized Fourier estimation.
//!
//! Each of `M` samples draws a time `k` uniformly from `{0, …, K-1}`, runs a
//! real and an imaginary Hadamard test at that depth, and adds
//! `(c + is) e^{-2πikj/K} / M` to every coefficient estimate. The output is
//! `2πj*/K` for the largest-magnitude coefficient `j*`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{self, BoundsQuery};
use crate::hadamard::sample_pair;
use crate::math::{cos, sin, PI, TAU};
use crate::noise::{DeviationTable, NoiseModel};
use crate::spectrum::{argmax_magnitude, Phase};
use crate::{Error, Result};

/// Inputs to one estimator run. `theta` is the simulated ground truth.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunConfig {
    pub samples: u64,
    pub grid_size: usize,
    pub theta: Phase,
    pub noise: NoiseModel,
    pub seed: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidInput("sample count M must be at least 1".into()));
        }
        if self.grid_size == 0 {
            return Err(Error::InvalidInput("grid size K must be at least 1".into()));
        }
        self.noise.validate()
    }
}

/// The estimated coefficients `f̂ⱼ` and bookkeeping for one run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectrumEstimate {
    pub coefficients: Vec<Complex64>,
    pub samples_used: u64,
    /// `Σᵢ kᵢ`: c-U applications per test. Twice this many run in total.
    pub total_depth: u64,
    /// Samples where either likelihood had to be clamped into `[0, 1]`.
    pub clamp_count: u64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialResult {
    pub theta_hat: f64,
    pub winning_index: usize,
    pub spectrum: SpectrumEstimate,
}

impl TrialResult {
    pub fn grid_size(&self) -> usize {
        self.spectrum.coefficients.len()
    }
}

/// Streaming accumulator for the coefficient estimates, `O(K)` memory.
#[derive(Debug, Clone)]
pub struct SpectrumAccumulator {
    twiddles: Vec<Complex64>,
    sums: Vec<Complex64>,
    scale: f64,
    pushed: u64,
    total_depth: u64,
    clamp_count: u64,
}

impl SpectrumAccumulator {
    /// `expected_samples` is the `M` every contribution is divided by.
    pub fn new(grid_size: usize, expected_samples: u64) -> Self {
        assert!(grid_size >= 1, "grid size must be at least 1");
        let k = grid_size as f64;
        let twiddles = (0..grid_size)
            .map(|m| {
                let angle = -TAU * m as f64 / k;
                Complex64::new(cos(angle), sin(angle))
            })
            .collect();
        Self {
            twiddles,
            sums: vec![Complex64::new(0.0, 0.0); grid_size],
            scale: 1.0 / expected_samples.max(1) as f64,
            pushed: 0,
            total_depth: 0,
            clamp_count: 0,
        }
    }

    pub fn grid_size(&self) -> usize {
        self.sums.len()
    }

    /// `f̂ⱼ += (c + is) e^{-2πikj/K} / M` for every `j`.
    pub fn push(&mut self, k: usize, c: i8, s: i8, clamped: bool) {
        let grid = self.sums.len();
        let term = Complex64::new(c as f64, s as f64) * self.scale;
        let step = k % grid;
        let mut index = 0usize;
        for sum in self.sums.iter_mut() {
            *sum += term * self.twiddles[index];
            index += step;
            if index >= grid {
                index -= grid;
            }
        }
        self.pushed += 1;
        self.total_depth += k as u64;
        self.clamp_count += clamped as u64;
    }

    pub fn finish(self) -> SpectrumEstimate {
        SpectrumEstimate {
            coefficients: self.sums,
            samples_used: self.pushed,
            total_depth: self.total_depth,
            clamp_count: self.clamp_count,
        }
    }
}

/// Runs the estimator with an explicit random source. Stochastic noise
/// tables are drawn from `rng` before the first sample and held fixed.
pub fn run_rfe_with<R: Rng + ?Sized>(
    samples: u64,
    grid_size: usize,
    theta: Phase,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<TrialResult> {
    let run_noise: Option<DeviationTable> = noise.draw_run_noise(grid_size, rng);
    let mut acc = SpectrumAccumulator::new(grid_size, samples);
    for _ in 0..samples {
        let k = rng.random_range(0..grid_size);
        let (bx, by) = noise.bias(theta, k, run_noise.as_ref())?;
        let outcome = sample_pair(bx, by, k, rng)?;
        acc.push(k, outcome.c, outcome.s, outcome.clamped);
    }
    let spectrum = acc.finish();
    let winning_index = argmax_magnitude(&spectrum.coefficients);
    Ok(TrialResult {
        theta_hat: TAU * winning_index as f64 / grid_size as f64,
        winning_index,
        spectrum,
    })
}

/// One run, seeded from `config.seed`. Equal configs give equal results.
pub fn run_rfe(config: &RunConfig) -> Result<TrialResult> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    run_rfe_with(config.samples, config.grid_size, config.theta, &config.noise, &mut rng)
}

/// Picks `K` and `M` for target accuracy `ε` and failure probability `δ`
/// under `noise`, then runs the estimator.
///
/// For `ε ≥ π/2` the answer π/2 (index 1 on a grid of 4) is returned without
/// sampling. Noise at or beyond its threshold is an error.
pub fn estimate_phase(epsilon: f64, delta: f64, noise: &NoiseModel, theta: Phase, seed: u64) -> Result<TrialResult> {
    let plan = bounds::report(&BoundsQuery::new(epsilon, delta, noise.clone()))?;
    if plan.trivial {
        return Ok(TrialResult {
            theta_hat: PI / 2.0,
            winning_index: 1,
            spectrum: SpectrumEstimate {
                coefficients: vec![Complex64::new(0.0, 0.0); 4],
                samples_used: 0,
                total_depth: 0,
                clamp_count: 0,
            },
        });
    }
    run_rfe(&RunConfig {
        samples: plan.samples,
        grid_size: plan.grid_size,
        theta,
        noise: noise.clone(),
        seed,
    })
}
