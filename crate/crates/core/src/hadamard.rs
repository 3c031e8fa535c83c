//! One real/imaginary Hadamard-test pair, sampled straight from its
//! likelihoods `Pr(c = ±1) = (1 ± bx)/2` and `Pr(s = ±1) = (1 ± by)/2`.

use rand::Rng;

use crate::{Error, Result};

const CLAMP_TOLERANCE: f64 = 1e-15;

/// Outcomes of the real (`c`) and imaginary (`s`) tests at time `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HadamardOutcome {
    pub c: i8,
    pub s: i8,
    pub k: usize,
    /// Set when either probability had to be clamped into `[0, 1]`.
    pub clamped: bool,
}

/// Probability of a `+1` outcome for bias `b`, clamped into `[0, 1]`, and
/// whether clamping moved it.
#[inline]
pub fn plus_probability(bias: f64) -> (f64, bool) {
    let raw = (1.0 + bias) / 2.0;
    let p = raw.clamp(0.0, 1.0);
    (p, (raw - p).abs() > CLAMP_TOLERANCE)
}

/// Draws `c` and `s` independently; each comes from its own circuit execution.
pub fn sample_pair<R: Rng + ?Sized>(bx: f64, by: f64, k: usize, rng: &mut R) -> Result<HadamardOutcome> {
    if !bx.is_finite() || !by.is_finite() {
        return Err(Error::NonFiniteBias { bx, by });
    }
    let (pc, clamped_c) = plus_probability(bx);
    let (ps, clamped_s) = plus_probability(by);
    let c = if rng.random::<f64>() < pc { 1 } else { -1 };
    let s = if rng.random::<f64>() < ps { 1 } else { -1 };
    Ok(HadamardOutcome {
        c,
        s,
        k,
        clamped: clamped_c || clamped_s,
    })
}
