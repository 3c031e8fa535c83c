//! Expected Fourier spectrum of the time signal `g(k) = e^{ikθ}` over a
//! length-`K` window.
//!
//! The magnitude of the expected coefficient at grid index `j` is
//! `|S_K(j - Kθ/2π)|`, where `S_K(x) = sin(πx) / (K sin(πx/K))`. Grid indices
//! are grouped by their circular distance to `Kθ/2π`: the close index (or two
//! indices) always has magnitude at least `2/π`, every non-adjacent index has
//! magnitude at most `1/(2√2) < 10/(9π)` once `K ≥ 4`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math::{abs, cos, round, sin, PI, TAU};
use crate::{Error, Result};

/// Below this offset from a removable singularity the kernel switches to its
/// Taylor expansion.
const SERIES_CUTOFF: f64 = 1e-6;

/// An eigenphase in radians.
///
/// Any value in `[0, 2π)` is accepted. Guarantees from [`crate::bounds`]
/// assume `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "f64", into = "f64"))]
pub struct Phase(f64);

impl Phase {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..TAU).contains(&theta) {
            return Err(Error::InvalidInput(alloc::format!(
                "phase {theta} is outside [0, 2π)"
            )));
        }
        Ok(Self(theta))
    }

    #[inline]
    pub fn radians(self) -> f64 {
        self.0
    }

    /// `Kθ/2π`: the phase expressed in grid units.
    #[inline]
    pub fn grid_position(self, grid_size: usize) -> f64 {
        grid_size as f64 * self.0 / TAU
    }

    /// Whether the success guarantees of the sample-count bounds apply.
    #[inline]
    pub fn is_guaranteed_range(self) -> bool {
        self.0 <= PI
    }
}

impl From<Phase> for f64 {
    fn from(theta: Phase) -> f64 {
        theta.0
    }
}

impl TryFrom<f64> for Phase {
    type Error = Error;

    fn try_from(theta: f64) -> Result<Self> {
        Self::new(theta)
    }
}

/// `S_K(x) = sin(πx) / (K sin(πx/K))`.
///
/// Total for `K ≥ 1`. At `x = mK` the removable singularity is replaced by the
/// limit `(-1)^{m(K-1)}`.
pub fn dirichlet_kernel(x: f64, grid_size: usize) -> f64 {
    assert!(grid_size >= 1, "grid size must be at least 1");
    let k = grid_size as f64;
    // x = mK + d with |d| <= K/2; the sign of the period shift is (-1)^{m(K-1)}.
    let m = round(x / k);
    let d = x - m * k;
    let parity_flip = (grid_size - 1) % 2 == 1 && (m as i64).rem_euclid(2) == 1;
    let sign = if parity_flip { -1.0 } else { 1.0 };

    let reduced = if abs(d) < SERIES_CUTOFF {
        // sin(πd)/(K sin(πd/K)) = 1 - (πd)²(1 - 1/K²)/6 + O(d⁴)
        let pd = PI * d;
        1.0 - pd * pd * (1.0 - 1.0 / (k * k)) / 6.0
    } else {
        sin(PI * d) / (k * sin(PI * d / k))
    };
    sign * reduced
}

/// Closed-form expected coefficient
/// `f_j = (1/K)(1 - e^{iK(θ-2πj/K)}) / (1 - e^{i(θ-2πj/K)})`.
///
/// Evaluated as `e^{iφ(K-1)/2} · S_K(Kφ/2π)` with `φ = θ - 2πj/K`, which is
/// the same quantity without the 0/0 at on-grid phases (where it returns 1).
pub fn expected_coefficient(theta: Phase, j: usize, grid_size: usize) -> Complex64 {
    assert!(grid_size >= 1, "grid size must be at least 1");
    let k = grid_size as f64;
    let offset = theta.radians() - TAU * (j % grid_size) as f64 / k;
    let magnitude = dirichlet_kernel(k * offset / TAU, grid_size);
    let rotation = offset * (k - 1.0) / 2.0;
    Complex64::new(cos(rotation), sin(rotation)) * magnitude
}

/// The `K` expected coefficients of a pure tone at phase `θ`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExpectedSpectrum {
    pub grid_size: usize,
    pub coefficients: Vec<Complex64>,
}

impl ExpectedSpectrum {
    /// Index of the largest magnitude; ties go to the smallest index.
    pub fn peak_index(&self) -> usize {
        argmax_magnitude(&self.coefficients)
    }
}

pub fn expected_spectrum(theta: Phase, grid_size: usize) -> ExpectedSpectrum {
    let coefficients = (0..grid_size)
        .map(|j| expected_coefficient(theta, j, grid_size))
        .collect();
    ExpectedSpectrum {
        grid_size,
        coefficients,
    }
}

/// Position of a grid index relative to the true phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FrequencyClass {
    /// Circular distance at most 1/2.
    Close,
    /// Circular distance in (1/2, 1).
    AdjacentOnly,
    /// Circular distance at least 1.
    NonAdjacent,
}

/// Circular distance between grid index `j` and `Kθ/2π`, in grid units.
pub fn circular_distance(j: usize, theta: Phase, grid_size: usize) -> f64 {
    let k = grid_size as f64;
    let mut diff = (j as f64 - theta.grid_position(grid_size)) % k;
    if diff < 0.0 {
        diff += k;
    }
    diff.min(k - diff)
}

pub fn classify_frequency(j: usize, theta: Phase, grid_size: usize) -> FrequencyClass {
    assert!(grid_size >= 1, "grid size must be at least 1");
    let d = circular_distance(j % grid_size, theta, grid_size);
    if d <= 0.5 {
        FrequencyClass::Close
    } else if d < 1.0 {
        FrequencyClass::AdjacentOnly
    } else {
        FrequencyClass::NonAdjacent
    }
}

/// Index of the largest `|z|`, smallest index on ties. Empty input yields 0.
pub fn argmax_magnitude(values: &[Complex64]) -> usize {
    let mut best = 0;
    let mut best_norm = f64::NEG_INFINITY;
    for (j, z) in values.iter().enumerate() {
        let n = z.norm_sqr();
        if n > best_norm {
            best = j;
            best_norm = n;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn phase(t: f64) -> Phase {
        Phase::new(t).unwrap()
    }

    // Direct K-term summation; independent of the closed form.
    fn summed(theta: f64, j: usize, k: usize) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in 0..k {
            let arg = t as f64 * theta - TAU * (j * t) as f64 / k as f64;
            acc += Complex64::new(arg.cos(), arg.sin());
        }
        acc / k as f64
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(dirichlet_kernel(0.0, 8), 1.0);
        assert_abs_diff_eq!(dirichlet_kernel(1.0, 8), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dirichlet_kernel(0.5, 1000), 0.636_620_034_167_044_5, epsilon = 1e-12);
        assert_eq!(dirichlet_kernel(8.0, 8), -1.0);
        assert_eq!(dirichlet_kernel(7.0, 7), 1.0);
        assert_eq!(dirichlet_kernel(-16.0, 8), 1.0);
        assert_eq!(dirichlet_kernel(3.7, 1), 1.0);
    }

    #[test]
    fn kernel_is_continuous_across_the_series_cutoff() {
        for k in [2usize, 5, 8, 63] {
            for m in [0.0, 1.0, -2.0] {
                let center = m * k as f64;
                let inside = dirichlet_kernel(center + 0.9 * SERIES_CUTOFF, k);
                let outside = dirichlet_kernel(center + 1.1 * SERIES_CUTOFF, k);
                assert_abs_diff_eq!(inside, outside, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn coefficient_examples() {
        let on_grid = phase(TAU * 3.0 / 8.0);
        let peak = expected_coefficient(on_grid, 3, 8);
        assert_abs_diff_eq!(peak.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(peak.im, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(expected_coefficient(on_grid, 5, 8).norm(), 0.0, epsilon = 1e-15);

        let t = phase(2.25);
        let f = expected_coefficient(t, 28, 79);
        let s = dirichlet_kernel(28.0 - 79.0 * 2.25 / TAU, 79);
        assert_abs_diff_eq!(f.norm(), s.abs(), epsilon = 1e-12);
        assert_abs_diff_eq!(f.re, summed(2.25, 28, 79).re, epsilon = 1e-12);
        assert_abs_diff_eq!(f.im, summed(2.25, 28, 79).im, epsilon = 1e-12);
    }

    #[test]
    fn coefficient_matches_literal_ratio_away_from_singularity() {
        let (theta, k) = (1.234_f64, 17usize);
        for j in 0..k {
            let phi = theta - TAU * j as f64 / k as f64;
            let num = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, k as f64 * phi);
            let den = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, phi);
            let literal = num / den / k as f64;
            let got = expected_coefficient(phase(theta), j, k);
            assert_abs_diff_eq!((got - literal).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn spectrum_examples() {
        let flat = expected_spectrum(phase(0.0), 8);
        assert_abs_diff_eq!(flat.coefficients[0].re, 1.0, epsilon = 1e-15);
        assert!(flat.coefficients[1..].iter().all(|z| z.norm() < 1e-15));

        let tone = expected_spectrum(phase(TAU * 3.0 / 8.0), 8);
        assert_eq!(tone.peak_index(), 3);
        for (j, z) in tone.coefficients.iter().enumerate() {
            let want = if j == 3 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(z.norm(), want, epsilon = 1e-14);
        }

        assert_eq!(expected_spectrum(phase(2.25), 79).peak_index(), 28);
    }

    #[test]
    fn classification_examples() {
        let t = phase(2.25);
        assert_eq!(classify_frequency(28, t, 79), FrequencyClass::Close);
        assert_eq!(classify_frequency(29, t, 79), FrequencyClass::AdjacentOnly);
        assert_eq!(classify_frequency(30, t, 79), FrequencyClass::NonAdjacent);
        assert_eq!(classify_frequency(27, t, 79), FrequencyClass::NonAdjacent);
        // wraps around the circle
        let near_top = phase(7.7 * TAU / 8.0);
        assert_eq!(classify_frequency(0, near_top, 8), FrequencyClass::Close);
        assert_eq!(classify_frequency(7, near_top, 8), FrequencyClass::AdjacentOnly);
        assert_eq!(classify_frequency(1, near_top, 8), FrequencyClass::NonAdjacent);
        assert_eq!(classify_frequency(8, near_top, 8), FrequencyClass::Close);
    }

    #[test]
    fn phase_rejects_out_of_range() {
        assert!(Phase::new(-0.1).is_err());
        assert!(Phase::new(TAU).is_err());
        assert!(Phase::new(f64::NAN).is_err());
        assert!(Phase::new(6.0).unwrap().radians() == 6.0);
        assert!(!Phase::new(3.5).unwrap().is_guaranteed_range());
    }

    #[test]
    fn argmax_prefers_smallest_index_on_ties() {
        let v = [
            Complex64::new(0.0, 1.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ];
        assert_eq!(argmax_magnitude(&v), 0);
        assert_eq!(argmax_magnitude(&[]), 0);
    }
}
