//! Closed-form resource calculators: grid size, sample counts, in-spec
//! failure bounds and expected circuit depth.
//!
//! Sample counts follow the stated success guarantees exactly,
//! with one ceiling applied to the whole expression. The `*_real` variants
//! return the value before the ceiling.
//!
//! Two formulas have a second, re-derived form next to the stated one:
//! the Gaussian sample count ([`samples_gaussian_rederived`]) and the
//! dephasing ratio ([`crate::noise::dephasing_ratio_threshold_derived`]).
//! [`derivation_check`] puts both side by side.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};

use crate::math::{ceil, exp, ln, sqrt, PI, SQRT_2, TAU};
use crate::noise::{self, ban_threshold, NoiseModel};
use crate::{Error, Result};

/// `81π²/2`, the Hoeffding constant shared by every sample bound.
pub fn hoeffding_constant() -> f64 {
    81.0 * PI * PI / 2.0
}

/// `9π/(2√2)`, the slope of the adversarial shrink factor `1 - cη̄`.
pub fn ban_slope() -> f64 {
    9.0 * PI / (2.0 * SQRT_2)
}

/// Half-width of the in-spec disc, `4/(9π)`.
pub fn inspec_radius() -> f64 {
    4.0 / (9.0 * PI)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidInput(alloc::format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(())
}

fn check_accuracy(epsilon: f64, delta: f64) -> Result<()> {
    check_epsilon(epsilon)?;
    if epsilon >= PI / 2.0 {
        return Err(Error::InvalidInput(alloc::format!(
            "epsilon = {epsilon} is at least π/2; any output of π/2 is already accurate"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(alloc::format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

fn to_count(value: f64) -> Result<u64> {
    let c = ceil(value);
    if !(c.is_finite() && c < u64::MAX as f64) {
        return Err(Error::InvalidInput(alloc::format!("sample count {value} does not fit in 64 bits")));
    }
    Ok(c as u64)
}

/// `⌈2π/ε⌉`.
pub fn grid_size(epsilon: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    let k = ceil(TAU / epsilon);
    if k > usize::MAX as f64 {
        return Err(Error::InvalidInput(alloc::format!("epsilon = {epsilon} is too small")));
    }
    Ok(k as usize)
}

/// `(81π²/2) ln(8π/(δε))` before the ceiling.
pub fn samples_noiseless_real(epsilon: f64, delta: f64) -> Result<f64> {
    check_accuracy(epsilon, delta)?;
    Ok(hoeffding_constant() * ln(8.0 * PI / (delta * epsilon)))
}

pub fn samples_noiseless(epsilon: f64, delta: f64) -> Result<u64> {
    to_count(samples_noiseless_real(epsilon, delta)?)
}

/// `(1 - (9π/(2√2)) η̄)^{-2}`.
pub fn ban_inflation(eta_bar: f64) -> Result<f64> {
    let threshold = ban_threshold();
    if !(eta_bar.is_finite() && eta_bar >= 0.0) {
        return Err(Error::InvalidInput(alloc::format!("eta_bar must be non-negative, got {eta_bar}")));
    }
    if eta_bar >= threshold {
        return Err(Error::BoundsUnachievable {
            parameter: "eta_bar",
            value: eta_bar,
            threshold,
        });
    }
    let shrink = 1.0 - ban_slope() * eta_bar;
    Ok(1.0 / (shrink * shrink))
}

pub fn samples_ban_real(epsilon: f64, delta: f64, eta_bar: f64) -> Result<f64> {
    let base = samples_noiseless_real(epsilon, delta)?;
    Ok(base * ban_inflation(eta_bar)?)
}

/// Sample count under bounded adversarial noise `η̄ < 2√2/(9π)`.
pub fn samples_ban(epsilon: f64, delta: f64, eta_bar: f64) -> Result<u64> {
    to_count(samples_ban_real(epsilon, delta, eta_bar)?)
}

/// `ln(16π/(δε))`: the logarithm with half the failure budget left for the
/// noise draw.
fn gaussian_log(epsilon: f64, delta: f64) -> f64 {
    ln(16.0 * PI / (delta * epsilon))
}

/// `√(64/(81πε) · ln(16π/(δε)))`.
pub fn sigma_max(epsilon: f64, delta: f64) -> Result<f64> {
    check_accuracy(epsilon, delta)?;
    Ok(sqrt(64.0 / (81.0 * PI * epsilon) * gaussian_log(epsilon, delta)))
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidInput(alloc::format!("sigma must be non-negative, got {sigma}")));
    }
    Ok(())
}

/// `(1 - (9σ/8)√(επ / ln(16π/(δε))))^{-2}`.
pub fn gaussian_inflation(epsilon: f64, delta: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let threshold = sigma_max(epsilon, delta)?;
    if sigma >= threshold {
        return Err(Error::BoundsUnachievable {
            parameter: "sigma",
            value: sigma,
            threshold,
        });
    }
    let shrink = 1.0 - 9.0 * sigma / 8.0 * sqrt(epsilon * PI / gaussian_log(epsilon, delta));
    Ok(1.0 / (shrink * shrink))
}

pub fn samples_gaussian_real(epsilon: f64, delta: f64, sigma: f64) -> Result<f64> {
    let factor = gaussian_inflation(epsilon, delta, sigma)?;
    Ok(hoeffding_constant() * gaussian_log(epsilon, delta) * factor)
}

/// Sample count under Gaussian noise, in its stated form.
pub fn samples_gaussian(epsilon: f64, delta: f64, sigma: f64) -> Result<u64> {
    to_count(samples_gaussian_real(epsilon, delta, sigma)?)
}

/// Largest σ for which [`samples_gaussian_rederived`] is finite:
/// `8 / (9√(επ ln(16π/(δε))))`.
pub fn sigma_max_rederived(epsilon: f64, delta: f64) -> Result<f64> {
    check_accuracy(epsilon, delta)?;
    Ok(8.0 / (9.0 * sqrt(epsilon * PI * gaussian_log(epsilon, delta))))
}

/// Sample count obtained by substituting `η̄² = (σ²/4K) ln(8K/δ)` with
/// `K = 2π/ε` into the adversarial bound at failure budget `δ/2`. The shrink
/// term becomes `(9σ/8)√(επ ln(16π/(δε)))`.
pub fn samples_gaussian_rederived(epsilon: f64, delta: f64, sigma: f64) -> Result<u64> {
    check_sigma(sigma)?;
    let threshold = sigma_max_rederived(epsilon, delta)?;
    if sigma >= threshold {
        return Err(Error::BoundsUnachievable {
            parameter: "sigma",
            value: sigma,
            threshold,
        });
    }
    let l = gaussian_log(epsilon, delta);
    let shrink = 1.0 - 9.0 * sigma / 8.0 * sqrt(epsilon * PI * l);
    to_count(hoeffding_constant() * l / (shrink * shrink))
}

/// Union bound on some coefficient leaving the in-spec disc:
/// `4K exp(-2M (1 - cη̄)² / (81π²))`, capped at 1. `η̄` at or above the
/// adversarial threshold gives 1.
pub fn inspec_failure_bound(samples: u64, grid_size: usize, eta_bar: Option<f64>) -> f64 {
    let shrink = match eta_bar {
        None => 1.0,
        Some(e) if e >= ban_threshold() || e.is_nan() => return 1.0,
        Some(e) => 1.0 - ban_slope() * e.max(0.0),
    };
    let bound = 4.0 * grid_size as f64 * exp(-2.0 * samples as f64 * shrink * shrink / (81.0 * PI * PI));
    bound.min(1.0)
}

/// BAN bound that a Gaussian draw exceeds with probability at most `δ/2`:
/// `η̄ = √((σ²/4K) ln(8K/δ))`.
pub fn gaussian_etabar(sigma: f64, grid_size: usize, delta: f64) -> f64 {
    let k = grid_size as f64;
    sqrt(sigma * sigma / (4.0 * k) * ln(8.0 * k / delta))
}

/// `M(K-1)/2`, the expected number of c-U applications over one run
/// (per test; the real and imaginary circuits double the circuit count).
pub fn expected_total_depth(samples: u64, grid_size: usize) -> f64 {
    samples as f64 * (grid_size as f64 - 1.0) / 2.0
}

/// Target accuracy, failure probability and noise model.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundsQuery {
    pub epsilon: f64,
    pub delta: f64,
    pub noise: NoiseModel,
}

impl BoundsQuery {
    pub fn new(epsilon: f64, delta: f64, noise: NoiseModel) -> Self {
        Self { epsilon, delta, noise }
    }
}

/// Parameters that carry a success guarantee for a query.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundsReport {
    #[cfg_attr(feature = "serde", serde(rename = "K"))]
    pub grid_size: usize,
    #[cfg_attr(feature = "serde", serde(rename = "M"))]
    pub samples: u64,
    pub inflation_factor: f64,
    pub expected_total_depth: f64,
    /// `true` when `ε ≥ π/2` and the estimate π/2 needs no samples.
    pub trivial: bool,
    pub thresholds: BTreeMap<String, f64>,
}

/// Effective adversarial bound for models that embed into it, and the
/// largest `K/T₂` for the dephasing-type models.
fn embedded_eta_bar(noise: &NoiseModel, grid_size: usize) -> Option<f64> {
    match *noise {
        NoiseModel::Ban { eta_bar, .. } => Some(eta_bar),
        NoiseModel::Dephasing { t2 } => Some(noise::dephasing_eta_bound(grid_size, t2)),
        NoiseModel::HighCoherence { t2 } => Some(grid_size as f64 / t2),
        _ => None,
    }
}

/// Grid size, sample count and diagnostics for a query.
///
/// Dephasing and its high-coherence expansion are treated as bounded
/// adversaries with `η̄ = 1 - e^{-K/T₂}` and `η̄ = K/T₂`. Growing-variance
/// Gaussian noise has no guarantee and is rejected.
pub fn report(query: &BoundsQuery) -> Result<BoundsReport> {
    let BoundsQuery { epsilon, delta, ref noise } = *query;
    noise.validate()?;
    check_epsilon(epsilon)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(alloc::format!("delta must lie in (0, 1), got {delta}")));
    }

    let mut thresholds = BTreeMap::new();
    thresholds.insert("ban_threshold".to_string(), ban_threshold());
    thresholds.insert("dephasing_ratio_stated".to_string(), noise::dephasing_ratio_threshold_paper());
    thresholds.insert("dephasing_ratio_derived".to_string(), noise::dephasing_ratio_threshold_derived());

    if epsilon >= PI / 2.0 {
        return Ok(BoundsReport {
            grid_size: 4,
            samples: 0,
            inflation_factor: 1.0,
            expected_total_depth: 0.0,
            trivial: true,
            thresholds,
        });
    }

    let grid = grid_size(epsilon)?;
    let (samples, inflation, eta_for_inspec) = match *noise {
        NoiseModel::Ideal => (samples_noiseless(epsilon, delta)?, 1.0, None),
        NoiseModel::Gaussian { sigma } => {
            thresholds.insert("sigma_max".to_string(), sigma_max(epsilon, delta)?);
            thresholds.insert("sigma_max_rederived".to_string(), sigma_max_rederived(epsilon, delta)?);
            let eta = gaussian_etabar(sigma, grid, delta);
            thresholds.insert("eta_bar_effective".to_string(), eta);
            if let Ok(m) = samples_gaussian_rederived(epsilon, delta, sigma) {
                thresholds.insert("samples_rederived".to_string(), m as f64);
            }
            (
                samples_gaussian(epsilon, delta, sigma)?,
                gaussian_inflation(epsilon, delta, sigma)?,
                Some(eta),
            )
        }
        NoiseModel::GaussianLinear { .. } => return Err(Error::NoGuarantee { model: noise.name() }),
        NoiseModel::Ban { .. } | NoiseModel::Dephasing { .. } | NoiseModel::HighCoherence { .. } => {
            let eta = embedded_eta_bar(noise, grid).unwrap_or(0.0);
            thresholds.insert("eta_bar_effective".to_string(), eta);
            if let NoiseModel::Dephasing { t2 } | NoiseModel::HighCoherence { t2 } = *noise {
                thresholds.insert("k_over_t2".to_string(), grid as f64 / t2);
            }
            if let NoiseModel::Dephasing { .. } = noise {
                // largest K/T₂ with 1 - e^{-K/T₂} below the adversarial threshold
                thresholds.insert("dephasing_ratio_embedded".to_string(), -ln(1.0 - ban_threshold()));
            }
            let parameter = match noise {
                NoiseModel::Ban { .. } => "eta_bar",
                NoiseModel::Dephasing { .. } => "dephasing eta_bar = 1 - exp(-K/T2)",
                _ => "high-coherence eta_bar = K/T2",
            };
            let inflation = ban_inflation(eta).map_err(|e| match e {
                Error::BoundsUnachievable { value, threshold, .. } => Error::BoundsUnachievable {
                    parameter,
                    value,
                    threshold,
                },
                other => other,
            })?;
            (samples_ban(epsilon, delta, eta)?, inflation, Some(eta))
        }
    };
    thresholds.insert(
        "inspec_failure_bound".to_string(),
        inspec_failure_bound(samples, grid, eta_for_inspec),
    );

    Ok(BoundsReport {
        grid_size: grid,
        samples,
        inflation_factor: inflation,
        expected_total_depth: expected_total_depth(samples, grid),
        trivial: false,
        thresholds,
    })
}

/// Minimum `T₂ / K` for which the high-coherence expansion stays under the
/// adversarial threshold at accuracy `ε`.
///
/// Bounding `η = K/T₂` gives a ratio of `1/η̄_max ≈ 10`; bounding the
/// probability shift `η/2` gives `1/(2η̄_max) ≈ 5`. Report only.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HighCoherenceReport {
    pub epsilon: f64,
    pub grid_size: usize,
    pub min_t2_over_k_bias_bound: f64,
    pub min_t2_over_k_probability_bound: f64,
    pub min_t2_bias_bound: f64,
    pub min_t2_probability_bound: f64,
}

pub fn high_coherence_report(epsilon: f64) -> Result<HighCoherenceReport> {
    let grid = grid_size(epsilon)?;
    let bias = 1.0 / ban_threshold();
    let probability = 1.0 / (2.0 * ban_threshold());
    Ok(HighCoherenceReport {
        epsilon,
        grid_size: grid,
        min_t2_over_k_bias_bound: bias,
        min_t2_over_k_probability_bound: probability,
        min_t2_bias_bound: bias * grid as f64,
        min_t2_probability_bound: probability * grid as f64,
    })
}

/// Stated constants next to their re-derived counterparts.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DerivationCheck {
    pub dephasing_ratio_stated: f64,
    pub dephasing_ratio_rederived: f64,
    pub gaussian_samples_stated: Option<u64>,
    pub gaussian_samples_rederived: Option<u64>,
    pub sigma_max_stated: f64,
    pub sigma_max_rederived: f64,
    /// In-spec failure bound at the noiseless sample count; exceeds `δ`
    /// slightly because `K = ⌈2π/ε⌉ > 2π/ε`.
    pub noiseless_inspec_bound: f64,
}

pub fn derivation_check(epsilon: f64, delta: f64, sigma: f64) -> Result<DerivationCheck> {
    let grid = grid_size(epsilon)?;
    Ok(DerivationCheck {
        dephasing_ratio_stated: noise::dephasing_ratio_threshold_paper(),
        dephasing_ratio_rederived: noise::dephasing_ratio_threshold_derived(),
        gaussian_samples_stated: samples_gaussian(epsilon, delta, sigma).ok(),
        gaussian_samples_rederived: samples_gaussian_rederived(epsilon, delta, sigma).ok(),
        sigma_max_stated: sigma_max(epsilon, delta)?,
        sigma_max_rederived: sigma_max_rederived(epsilon, delta)?,
        noiseless_inspec_bound: inspec_failure_bound(samples_noiseless(epsilon, delta)?, grid, None),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::AdversaryStrategy;
    use approx::assert_abs_diff_eq;

    // Reference values computed at 40 significant digits with mpmath.

    #[test]
    fn grid_sizes() {
        assert_eq!(grid_size(0.1).unwrap(), 63);
        assert_eq!(grid_size(0.08).unwrap(), 79);
        assert_eq!(grid_size(PI / 2.0).unwrap(), 4);
        assert!(grid_size(0.0).is_err());
        assert!(grid_size(-1.0).is_err());
    }

    #[test]
    fn noiseless_samples() {
        assert_abs_diff_eq!(samples_noiseless_real(0.1, 0.1).unwrap(), 3129.536_430_079_308, epsilon = 1e-8);
        assert_eq!(samples_noiseless(0.1, 0.1).unwrap(), 3130);
        assert_eq!(samples_noiseless(0.08, 0.105).unwrap(), 3200);
        assert!(samples_noiseless(0.1, 0.05).unwrap() > samples_noiseless(0.1, 0.1).unwrap());
        assert!(samples_noiseless(PI / 2.0, 0.1).is_err());
        assert!(samples_noiseless(0.1, 1.0).is_err());
    }

    #[test]
    fn ban_samples() {
        assert_eq!(samples_ban(0.1, 0.1, 0.0).unwrap(), 3130);
        assert_eq!(samples_ban(0.1, 0.1, 0.05).unwrap(), 12510);
        assert_abs_diff_eq!(ban_inflation(0.05).unwrap(), 3.997_190_769_259_854, epsilon = 1e-12);
        assert!(matches!(
            samples_ban(0.1, 0.1, ban_threshold()),
            Err(Error::BoundsUnachievable { parameter: "eta_bar", .. })
        ));
        assert!(samples_ban(0.1, 0.1, 0.15).is_err());
    }

    #[test]
    fn gaussian_samples() {
        assert_eq!(samples_gaussian(0.1, 0.1, 0.0).unwrap(), 3407);
        assert_eq!(samples_gaussian(0.1, 0.1, 0.1).unwrap(), 3559);
        assert_eq!(samples_gaussian(0.1, 0.1, 1.0).unwrap(), 5543);
        assert_abs_diff_eq!(gaussian_inflation(0.1, 0.1, 1.0).unwrap(), 1.626_906_646_900_469_8, epsilon = 1e-12);
        assert_abs_diff_eq!(sigma_max(0.1, 0.1).unwrap(), 4.629_731_027_503_124, epsilon = 1e-12);
        assert!(matches!(
            samples_gaussian(0.1, 0.1, 5.0),
            Err(Error::BoundsUnachievable { parameter: "sigma", .. })
        ));
        // the re-derived form is stricter at the same σ
        assert!(samples_gaussian_rederived(0.1, 0.1, 0.1).unwrap() > samples_gaussian(0.1, 0.1, 0.1).unwrap());
        assert_eq!(samples_gaussian_rederived(0.1, 0.1, 0.0).unwrap(), 3407);
    }

    #[test]
    fn sigma_max_scaling() {
        let a = sigma_max(0.1, 0.1).unwrap();
        let b = sigma_max(0.05, 0.1).unwrap();
        let log_ratio = (gaussian_log(0.05, 0.1) / gaussian_log(0.1, 0.1)).sqrt();
        assert_abs_diff_eq!(b / a, SQRT_2 * log_ratio, epsilon = 1e-12);
        let edge = sigma_max(PI / 2.0 - 1e-9, 1.0 - 1e-9).unwrap();
        assert!(edge.is_finite() && edge > 0.0);
    }

    #[test]
    fn inspec_bounds() {
        assert_abs_diff_eq!(inspec_failure_bound(3130, 63, None), 0.100_151_397_230_693_18, epsilon = 1e-12);
        assert_eq!(inspec_failure_bound(0, 63, None), 1.0);
        assert_eq!(inspec_failure_bound(0, 1, Some(0.05)), 1.0);
        assert_abs_diff_eq!(
            inspec_failure_bound(12510, 63, Some(0.05)),
            0.100_227_090_538_470_24,
            epsilon = 1e-12
        );
        assert_eq!(inspec_failure_bound(1_000_000, 63, Some(0.2)), 1.0);
    }

    #[test]
    fn gaussian_etabar_values() {
        assert_eq!(gaussian_etabar(0.0, 63, 0.1), 0.0);
        assert_abs_diff_eq!(gaussian_etabar(1.0, 63, 0.1), 0.183_929_348_938_806_48, epsilon = 1e-12);
        assert_abs_diff_eq!(gaussian_etabar(0.1, 63, 0.1), 0.018_392_934_893_880_648, epsilon = 1e-13);
    }

    #[test]
    fn depth() {
        assert_eq!(expected_total_depth(3130, 63), 97030.0);
        assert_eq!(expected_total_depth(3130, 1), 0.0);
        let per_sample = expected_total_depth(1, grid_size(0.1).unwrap());
        assert!((per_sample / (PI / 0.1) - 1.0).abs() < 0.02);
    }

    #[test]
    fn report_per_model() {
        let ideal = report(&BoundsQuery::new(0.1, 0.1, NoiseModel::Ideal)).unwrap();
        assert_eq!((ideal.grid_size, ideal.samples), (63, 3130));
        assert_eq!(ideal.inflation_factor, 1.0);
        assert_eq!(ideal.expected_total_depth, 97030.0);

        let ban = report(&BoundsQuery::new(
            0.1,
            0.1,
            NoiseModel::Ban { eta_bar: 0.05, strategy: AdversaryStrategy::SignFlip },
        ))
        .unwrap();
        assert_eq!((ban.grid_size, ban.samples), (63, 12510));

        let trivial = report(&BoundsQuery::new(2.0, 0.1, NoiseModel::Ideal)).unwrap();
        assert!(trivial.trivial);
        assert_eq!(trivial.samples, 0);

        let deph = report(&BoundsQuery::new(0.1, 0.1, NoiseModel::Dephasing { t2: 63.0 / 0.05 })).unwrap();
        assert_abs_diff_eq!(deph.thresholds["eta_bar_effective"], 1.0 - (-0.05f64).exp(), epsilon = 1e-15);
        let eta = 1.0 - (-0.05f64).exp();
        assert_eq!(deph.samples, samples_ban(0.1, 0.1, eta).unwrap());
        let cutoff = deph.thresholds["dephasing_ratio_embedded"];
        assert_abs_diff_eq!(cutoff, 0.105_399_567_797_771_7, epsilon = 1e-9);
        assert!(report(&BoundsQuery::new(0.1, 0.1, NoiseModel::Dephasing { t2: 63.0 / (0.999 * cutoff) })).is_ok());
        assert!(report(&BoundsQuery::new(0.1, 0.1, NoiseModel::Dephasing { t2: 63.0 / (1.001 * cutoff) })).is_err());

        let err = report(&BoundsQuery::new(0.1, 0.1, NoiseModel::Dephasing { t2: 63.0 / 0.3 })).unwrap_err();
        assert!(matches!(err, Error::BoundsUnachievable { .. }));
        assert!(matches!(
            report(&BoundsQuery::new(0.1, 0.1, NoiseModel::GaussianLinear { sigma: 0.01 })),
            Err(Error::NoGuarantee { .. })
        ));
        assert!(report(&BoundsQuery::new(0.1, 1.5, NoiseModel::Ideal)).is_err());
    }

    #[test]
    fn high_coherence_ratios() {
        let r = high_coherence_report(0.0004).unwrap();
        assert_eq!(r.grid_size, 15708);
        assert_abs_diff_eq!(r.min_t2_over_k_probability_bound, 4.998_243, epsilon = 1e-6);
        assert_abs_diff_eq!(r.min_t2_over_k_bias_bound, 9.996_486, epsilon = 1e-6);
    }

    #[test]
    fn derivation_check_flags_the_differences() {
        let d = derivation_check(0.1, 0.1, 0.1).unwrap();
        assert!((d.dephasing_ratio_stated - d.dephasing_ratio_rederived).abs() > 0.6);
        assert!(d.sigma_max_rederived < d.sigma_max_stated);
        assert!(d.noiseless_inspec_bound > 0.1 && d.noiseless_inspec_bound < 0.1 * (1.0 + 0.1 / TAU));
    }
}
