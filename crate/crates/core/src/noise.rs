//! Algorithm error models.
//!
//! A model perturbs the Hadamard-test biases to `(cos kθ + η₁ₖ, sin kθ + η₂ₖ)`.
//! Biases returned here are not clamped; the sampler clamps probabilities and
//! counts every clamp.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::math::{cos, exp, ln, sin, PI, SQRT_2};
use crate::spectrum::Phase;
use crate::{Error, Result};

/// Per-run deviations `η₁ₖ`, `η₂ₖ`, indexed by time `k`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DeviationTable {
    pub eta1: Vec<f64>,
    pub eta2: Vec<f64>,
}

impl DeviationTable {
    pub fn new(eta1: Vec<f64>, eta2: Vec<f64>) -> Result<Self> {
        if eta1.len() != eta2.len() {
            return Err(Error::InvalidInput(alloc::format!(
                "deviation table rows differ in length ({} vs {})",
                eta1.len(),
                eta2.len()
            )));
        }
        if eta1.iter().chain(&eta2).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("deviation table has non-finite entries".into()));
        }
        Ok(Self { eta1, eta2 })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            eta1: alloc::vec![0.0; len],
            eta2: alloc::vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.eta1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta1.is_empty()
    }

    pub fn get(&self, k: usize) -> Result<(f64, f64)> {
        match (self.eta1.get(k), self.eta2.get(k)) {
            (Some(&a), Some(&b)) => Ok((a, b)),
            _ => Err(Error::DeviationTableTooShort { len: self.len(), k }),
        }
    }

    /// Largest `|η|` over both rows.
    pub fn max_abs(&self) -> f64 {
        self.eta1
            .iter()
            .chain(&self.eta2)
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// How a bounded adversary picks its deviations.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AdversaryStrategy {
    Zero,
    ConstantPlus,
    ConstantMinus,
    /// Pushes each bias toward zero: `η₁ₖ = -η̄·sign(cos kθ)`,
    /// `η₂ₖ = -η̄·sign(sin kθ)`.
    SignFlip,
    /// Fixed table; entries must lie in `[-η̄, η̄]`.
    Custom(DeviationTable),
}

/// Description of how the Hadamard-test biases deviate from ideal.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum NoiseModel {
    #[default]
    Ideal,
    /// Bounded adversarial noise.
    Ban {
        eta_bar: f64,
        strategy: AdversaryStrategy,
    },
    /// Independent `N(0, σ²)` deviations, drawn once per run.
    Gaussian { sigma: f64 },
    /// Independent `N(0, (kσ)²)` deviations, drawn once per run.
    GaussianLinear { sigma: f64 },
    /// Coherent bias decays as `e^{-k/T₂}`. `t2` is in units of one c-U.
    Dephasing { t2: f64 },
    /// First-order expansion of dephasing for `K ≪ T₂`: `η₁ₖ = η₂ₖ = k/T₂`.
    HighCoherence { t2: f64 },
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl NoiseModel {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Ideal => "ideal",
            Self::Ban { .. } => "ban",
            Self::Gaussian { .. } => "gaussian",
            Self::GaussianLinear { .. } => "gaussian_linear",
            Self::Dephasing { .. } => "dephasing",
            Self::HighCoherence { .. } => "high_coherence",
        }
    }

    /// Checks parameter domains. Does not check guarantee thresholds; see
    /// [`crate::bounds`] for those.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidInput(alloc::format!("{}: {what}", self.name())));
        match self {
            Self::Ideal => Ok(()),
            Self::Ban { eta_bar, strategy } => {
                if !eta_bar.is_finite() || *eta_bar < 0.0 {
                    return bad("eta_bar must be finite and non-negative");
                }
                if let AdversaryStrategy::Custom(table) = strategy {
                    if table.max_abs() > *eta_bar {
                        return bad("custom deviations exceed eta_bar");
                    }
                }
                Ok(())
            }
            Self::Gaussian { sigma } | Self::GaussianLinear { sigma } => {
                if !sigma.is_finite() || *sigma < 0.0 {
                    return bad("sigma must be finite and non-negative");
                }
                Ok(())
            }
            Self::Dephasing { t2 } | Self::HighCoherence { t2 } => {
                if t2.is_nan() || *t2 <= 0.0 {
                    return bad("t2 must be positive");
                }
                Ok(())
            }
        }
    }

    /// Whether a fresh [`DeviationTable`] must be drawn at the start of each run.
    pub fn is_stochastic(&self) -> bool {
        matches!(self, Self::Gaussian { .. } | Self::GaussianLinear { .. })
    }

    /// Per-run deviation table for stochastic models, `None` otherwise.
    pub fn draw_run_noise<R: Rng + ?Sized>(&self, grid_size: usize, rng: &mut R) -> Option<DeviationTable> {
        match *self {
            Self::Gaussian { sigma } => Some(draw_gaussian_run_noise(sigma, grid_size, false, rng)),
            Self::GaussianLinear { sigma } => Some(draw_gaussian_run_noise(sigma, grid_size, true, rng)),
            _ => None,
        }
    }

    /// Perturbed biases `(cos kθ + η₁ₖ, sin kθ + η₂ₖ)`, unclamped.
    pub fn bias(&self, theta: Phase, k: usize, run_noise: Option<&DeviationTable>) -> Result<(f64, f64)> {
        let angle = k as f64 * theta.radians();
        let (c, s) = (cos(angle), sin(angle));
        match self {
            Self::Ideal => Ok((c, s)),
            Self::Ban { eta_bar, strategy } => {
                let (e1, e2) = match strategy {
                    AdversaryStrategy::Zero => (0.0, 0.0),
                    AdversaryStrategy::ConstantPlus => (*eta_bar, *eta_bar),
                    AdversaryStrategy::ConstantMinus => (-eta_bar, -eta_bar),
                    AdversaryStrategy::SignFlip => (-eta_bar * sign(c), -eta_bar * sign(s)),
                    AdversaryStrategy::Custom(table) => table.get(k)?,
                };
                Ok((c + e1, s + e2))
            }
            Self::Gaussian { .. } | Self::GaussianLinear { .. } => {
                let table = run_noise.ok_or(Error::MissingRunNoise { model: self.name() })?;
                let (e1, e2) = table.get(k)?;
                Ok((c + e1, s + e2))
            }
            Self::Dephasing { t2 } => {
                let decay = exp(-(k as f64) / t2);
                Ok((decay * c, decay * s))
            }
            Self::HighCoherence { t2 } => {
                let drift = k as f64 / t2;
                Ok((c + drift, s + drift))
            }
        }
    }

    /// The deviations `η₁ₖ, η₂ₖ` for `k = 0..K` implied by this model.
    pub fn deviations(&self, theta: Phase, grid_size: usize, run_noise: Option<&DeviationTable>) -> Result<DeviationTable> {
        let mut eta1 = Vec::with_capacity(grid_size);
        let mut eta2 = Vec::with_capacity(grid_size);
        for k in 0..grid_size {
            let angle = k as f64 * theta.radians();
            let (bx, by) = self.bias(theta, k, run_noise)?;
            eta1.push(bx - cos(angle));
            eta2.push(by - sin(angle));
        }
        Ok(DeviationTable { eta1, eta2 })
    }
}

/// Draws `2K` independent normal deviations with standard deviation `σ`
/// (or `kσ` at time `k` when `linear` is set).
pub fn draw_gaussian_run_noise<R: Rng + ?Sized>(sigma: f64, grid_size: usize, linear: bool, rng: &mut R) -> DeviationTable {
    let scale = |k: usize| if linear { k as f64 * sigma } else { sigma };
    let mut eta1 = Vec::with_capacity(grid_size);
    let mut eta2 = Vec::with_capacity(grid_size);
    for k in 0..grid_size {
        let a: f64 = StandardNormal.sample(rng);
        let b: f64 = StandardNormal.sample(rng);
        eta1.push(scale(k) * a);
        eta2.push(scale(k) * b);
    }
    DeviationTable { eta1, eta2 }
}

/// Largest adversarial deviation `η̄` with a success guarantee: `2√2/(9π)`.
pub fn ban_threshold() -> f64 {
    2.0 * SQRT_2 / (9.0 * PI)
}

/// Largest `K/T₂` for the dephasing model as printed alongside the bounded
/// adversary analysis: `-ln(1/2 - 2√2/(9π)) ≈ 0.916`.
pub fn dephasing_ratio_threshold_paper() -> f64 {
    -ln(0.5 - ban_threshold())
}

/// Largest `K/T₂` such that `(1 - e^{-K/T₂})/2 < 2√2/(9π)`, found by
/// bisection. Equals `-ln(1 - 4√2/(9π)) ≈ 0.2232`.
pub fn dephasing_ratio_threshold_derived() -> f64 {
    let target = ban_threshold();
    let excess = |x: f64| (1.0 - exp(-x)) / 2.0 - target;
    let (mut lo, mut hi) = (0.0_f64, 10.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Largest deviation the dephasing model produces over `k ≤ K`:
/// `1 - e^{-K/T₂}`.
pub fn dephasing_eta_bound(grid_size: usize, t2: f64) -> f64 {
    1.0 - exp(-(grid_size as f64) / t2)
}

/// `Var(η̂ⱼ)` for Gaussian deviations: `2σ²/K`, or
/// `2σ²(K-1)(2K-1)/(6K)` when the standard deviation grows as `kσ`.
pub fn gaussian_shift_variance(sigma: f64, grid_size: usize, linear: bool) -> f64 {
    let k = grid_size as f64;
    if linear {
        2.0 * sigma * sigma * (k - 1.0) * (2.0 * k - 1.0) / (6.0 * k)
    } else {
        2.0 * sigma * sigma / k
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn phase(t: f64) -> Phase {
        Phase::new(t).unwrap()
    }

    const STRATEGIES: [AdversaryStrategy; 4] = [
        AdversaryStrategy::Zero,
        AdversaryStrategy::ConstantPlus,
        AdversaryStrategy::ConstantMinus,
        AdversaryStrategy::SignFlip,
    ];

    #[test]
    fn bias_examples() {
        assert_eq!(NoiseModel::Ideal.bias(phase(1.3), 0, None).unwrap(), (1.0, 0.0));

        let faded = NoiseModel::Dephasing { t2: 1e-3 }.bias(phase(1.0), 50, None).unwrap();
        assert_abs_diff_eq!(faded.0, 0.0, epsilon = 1e-300);
        assert_abs_diff_eq!(faded.1, 0.0, epsilon = 1e-300);

        let (bx, by) = NoiseModel::Dephasing { t2: 10.0 }.bias(phase(1.0), 5, None).unwrap();
        assert_abs_diff_eq!(bx, (-0.5f64).exp() * 5f64.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(by, (-0.5f64).exp() * 5f64.sin(), epsilon = 1e-15);
        // same thing via the likelihood Pr(c=1|k) = 1/2 + e^{-k/T2} cos(kθ)/2
        let p = (-0.5f64).exp() * (1.0 + 5f64.cos()) / 2.0 + (1.0 - (-0.5f64).exp()) / 2.0;
        assert_abs_diff_eq!(bx, 2.0 * p - 1.0, epsilon = 1e-15);

        let ban = NoiseModel::Ban {
            eta_bar: 0.07,
            strategy: AdversaryStrategy::ConstantPlus,
        };
        let (bx, by) = ban.bias(phase(0.4), 3, None).unwrap();
        assert_abs_diff_eq!(bx, 1.2f64.cos() + 0.07, epsilon = 1e-15);
        assert_abs_diff_eq!(by, 1.2f64.sin() + 0.07, epsilon = 1e-15);

        let (bx, by) = NoiseModel::HighCoherence { t2: 100.0 }.bias(phase(0.4), 3, None).unwrap();
        assert_abs_diff_eq!(bx, 1.2f64.cos() + 0.03, epsilon = 1e-15);
        assert_abs_diff_eq!(by, 1.2f64.sin() + 0.03, epsilon = 1e-15);
    }

    #[test]
    fn sign_flip_shrinks_both_biases() {
        let model = NoiseModel::Ban {
            eta_bar: 0.05,
            strategy: AdversaryStrategy::SignFlip,
        };
        let t = phase(0.9);
        for k in 0..200 {
            let angle = k as f64 * 0.9;
            let (bx, by) = model.bias(t, k, None).unwrap();
            assert!(bx.abs() <= angle.cos().abs().max(0.05) + 1e-15);
            assert!(by.abs() <= angle.sin().abs().max(0.05) + 1e-15);
        }
        // sin(0) = 0 gets no push
        assert_eq!(model.bias(t, 0, None).unwrap(), (0.95, 0.0));
    }

    #[test]
    fn stochastic_models_need_a_table() {
        let err = NoiseModel::Gaussian { sigma: 0.1 }.bias(phase(1.0), 2, None).unwrap_err();
        assert_eq!(err, Error::MissingRunNoise { model: "gaussian" });
        let short = DeviationTable::zeros(2);
        let err = NoiseModel::GaussianLinear { sigma: 0.1 }.bias(phase(1.0), 2, Some(&short)).unwrap_err();
        assert_eq!(err, Error::DeviationTableTooShort { len: 2, k: 2 });
    }

    #[test]
    fn custom_table_is_used_and_validated() {
        let table = DeviationTable::new(alloc::vec![0.01, -0.02], alloc::vec![0.0, 0.03]).unwrap();
        let ok = NoiseModel::Ban {
            eta_bar: 0.03,
            strategy: AdversaryStrategy::Custom(table.clone()),
        };
        ok.validate().unwrap();
        let (bx, by) = ok.bias(phase(0.0), 1, None).unwrap();
        assert_abs_diff_eq!(bx, 0.98, epsilon = 1e-15);
        assert_abs_diff_eq!(by, 0.03, epsilon = 1e-15);
        assert!(ok.bias(phase(0.0), 2, None).is_err());

        let too_big = NoiseModel::Ban {
            eta_bar: 0.02,
            strategy: AdversaryStrategy::Custom(table),
        };
        assert!(too_big.validate().is_err());
        assert!(DeviationTable::new(alloc::vec![0.0], alloc::vec![]).is_err());
        assert!(DeviationTable::new(alloc::vec![f64::NAN], alloc::vec![0.0]).is_err());
    }

    #[test]
    fn validate_rejects_bad_parameters() {
        assert!(NoiseModel::Gaussian { sigma: -1.0 }.validate().is_err());
        assert!(NoiseModel::Dephasing { t2: 0.0 }.validate().is_err());
        assert!(NoiseModel::HighCoherence { t2: f64::NAN }.validate().is_err());
        assert!(NoiseModel::Ban { eta_bar: f64::INFINITY, strategy: AdversaryStrategy::Zero }
            .validate()
            .is_err());
        assert!(NoiseModel::Dephasing { t2: f64::INFINITY }.validate().is_ok());
    }

    #[test]
    fn ban_deviations_stay_bounded() {
        for strategy in STRATEGIES {
            for &eta_bar in &[0.0, 0.03, 0.1] {
                let model = NoiseModel::Ban { eta_bar, strategy: strategy.clone() };
                for i in 0..50 {
                    let t = phase(i as f64 * 0.1237);
                    let dev = model.deviations(t, 97, None).unwrap();
                    assert!(dev.max_abs() <= eta_bar + 1e-15, "{strategy:?} {eta_bar}");
                }
            }
        }
    }

    #[test]
    fn dephasing_embeds_into_ban() {
        for &(k, t2) in &[(63usize, 1260.0), (63, 630.0), (79, 395.0), (200, 50.0)] {
            let model = NoiseModel::Dephasing { t2 };
            let bound = dephasing_eta_bound(k, t2);
            for i in 0..40 {
                let dev = model.deviations(phase(i as f64 * 0.157), k + 1, None).unwrap();
                assert!(dev.max_abs() <= bound + 1e-15);
            }
        }
    }

    #[test]
    fn zero_parameters_reduce_to_ideal() {
        let t = phase(2.0);
        let zero_table = DeviationTable::zeros(64);
        let mut models = alloc::vec![
            NoiseModel::Gaussian { sigma: 0.0 },
            NoiseModel::Dephasing { t2: f64::INFINITY },
            NoiseModel::HighCoherence { t2: f64::INFINITY },
        ];
        for s in STRATEGIES {
            models.push(NoiseModel::Ban { eta_bar: 0.0, strategy: s });
        }
        for model in &models {
            for k in 0..64 {
                let (bx, by) = model.bias(t, k, Some(&zero_table)).unwrap();
                let (ix, iy) = NoiseModel::Ideal.bias(t, k, None).unwrap();
                assert_abs_diff_eq!(bx, ix, epsilon = 1e-12);
                assert_abs_diff_eq!(by, iy, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn long_dephasing_time_departs_from_ideal_by_k_over_t2() {
        let t = phase(2.0);
        let model = NoiseModel::Dephasing { t2: 1e9 };
        for k in 0..64 {
            let (bx, by) = model.bias(t, k, None).unwrap();
            let (ix, iy) = NoiseModel::Ideal.bias(t, k, None).unwrap();
            let slack = k as f64 / 1e9;
            assert!((bx - ix).abs() <= slack * ix.abs() + 1e-16);
            assert!((by - iy).abs() <= slack * iy.abs() + 1e-16);
        }
    }

    #[test]
    fn gaussian_table_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let zeros = draw_gaussian_run_noise(0.0, 16, false, &mut rng);
        assert_eq!(zeros, DeviationTable::zeros(16));

        let linear = draw_gaussian_run_noise(0.3, 8, true, &mut rng);
        assert_eq!(linear.eta1[0], 0.0);
        assert_eq!(linear.eta2[0], 0.0);

        let a = NoiseModel::Gaussian { sigma: 1.0 }.draw_run_noise(5, &mut ChaCha8Rng::seed_from_u64(9));
        let b = NoiseModel::Gaussian { sigma: 1.0 }.draw_run_noise(5, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
        assert!(NoiseModel::Ideal.draw_run_noise(5, &mut rng).is_none());
    }

    #[test]
    fn gaussian_draws_have_the_requested_spread() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let table = draw_gaussian_run_noise(0.5, 200_000, false, &mut rng);
        let n = table.len() as f64;
        let mean = table.eta1.iter().sum::<f64>() / n;
        let var = table.eta1.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        assert!(mean.abs() < 0.005);
        assert!((var.sqrt() - 0.5).abs() < 0.005);
    }

    #[test]
    fn thresholds() {
        assert_abs_diff_eq!(ban_threshold(), 0.100_035_146_239_678_45, epsilon = 1e-15);
        assert_abs_diff_eq!(dephasing_ratio_threshold_paper(), 0.916_378_601_333_759_1, epsilon = 1e-12);
        assert_abs_diff_eq!(dephasing_ratio_threshold_derived(), 0.223_231_420_773_813_78, epsilon = 1e-12);
        assert_abs_diff_eq!(
            dephasing_ratio_threshold_derived(),
            -(1.0 - 4.0 * SQRT_2 / (9.0 * PI)).ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn shift_variance_closed_forms() {
        assert_abs_diff_eq!(gaussian_shift_variance(1.0, 63, false), 2.0 / 63.0, epsilon = 1e-15);
        let direct: f64 = (0..30).map(|k| (k as f64 * 0.01).powi(2)).sum::<f64>() * 2.0 / 900.0;
        assert_abs_diff_eq!(gaussian_shift_variance(0.01, 30, true), direct, epsilon = 1e-15);
        assert!(gaussian_shift_variance(0.01, 30, true) <= 2.0 * 30.0 * 1e-4 / 3.0);
    }
}
