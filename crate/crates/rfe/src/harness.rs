//! Exact enumeration oracles, kernel-bound scans and seeded Monte Carlo
//! campaigns.
//!
//! Campaigns derive the seed of trial `i` from the master seed and `i` alone,
//! so results do not depend on the number of workers or on scheduling.

use std::f64::consts::{PI, TAU};
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rfe_core::bounds::{self, BoundsQuery};
use rfe_core::noise::{AdversaryStrategy, DeviationTable, NoiseModel};
use rfe_core::seed::derive_seed;
use rfe_core::spectrum::{classify_frequency, expected_coefficient, FrequencyClass};
use rfe_core::{estimate_phase, Complex64, Phase};

use crate::error::{Error, Result};

/// Largest grid the enumeration oracle accepts.
pub const MAX_ENUMERATION_GRID: usize = 4096;

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

/// `E f̂ⱼ` by exhaustive enumeration, and the noise contribution `η̂ⱼ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSpectrum {
    pub coefficients: Vec<Complex64>,
    pub noise_shift: Vec<Complex64>,
}

fn twiddle(j: usize, k: usize, grid: usize) -> Complex64 {
    let angle = -TAU * ((j * k) % grid) as f64 / grid as f64;
    Complex64::new(angle.cos(), angle.sin())
}

/// `η̂ⱼ = (1/K) Σₖ (η₁ₖ + iη₂ₖ) e^{-2πijk/K}` for every `j`.
pub fn noise_shift(deviations: &DeviationTable, grid: usize) -> Vec<Complex64> {
    (0..grid)
        .map(|j| {
            (0..grid)
                .map(|k| Complex64::new(deviations.eta1[k], deviations.eta2[k]) * twiddle(j, k, grid))
                .sum::<Complex64>()
                / grid as f64
        })
        .collect()
}

/// Expected coefficient estimates, summed over every time `k` and all four
/// outcomes `(c, s)` weighted by their clamped probabilities.
///
/// Deliberately shares no code with the estimator or the closed form.
pub fn exact_estimator_expectation(
    theta: Phase,
    grid: usize,
    deviations: Option<&DeviationTable>,
) -> Result<OracleSpectrum> {
    if grid == 0 || grid > MAX_ENUMERATION_GRID {
        return Err(Error::Enumeration(grid));
    }
    if let Some(d) = deviations {
        if d.len() < grid {
            return Err(rfe_core::Error::DeviationTableTooShort { len: d.len(), k: grid - 1 }.into());
        }
    }

    // E[c + is | k] by enumeration of (c, s) ∈ {±1}².
    let conditional: Vec<Complex64> = (0..grid)
        .map(|k| {
            let angle = k as f64 * theta.radians();
            let (e1, e2) = deviations.map_or((0.0, 0.0), |d| (d.eta1[k], d.eta2[k]));
            let pc = ((1.0 + angle.cos() + e1) / 2.0).clamp(0.0, 1.0);
            let ps = ((1.0 + angle.sin() + e2) / 2.0).clamp(0.0, 1.0);
            let mut mean = Complex64::new(0.0, 0.0);
            for (c, wc) in [(1.0, pc), (-1.0, 1.0 - pc)] {
                for (s, ws) in [(1.0, ps), (-1.0, 1.0 - ps)] {
                    mean += Complex64::new(c, s) * (wc * ws);
                }
            }
            mean
        })
        .collect();

    let coefficients = (0..grid)
        .map(|j| {
            conditional
                .iter()
                .enumerate()
                .map(|(k, z)| z * twiddle(j, k, grid))
                .sum::<Complex64>()
                / grid as f64
        })
        .collect();
    let shift = match deviations {
        Some(d) => noise_shift(d, grid),
        None => vec![Complex64::new(0.0, 0.0); grid],
    };
    Ok(OracleSpectrum {
        coefficients,
        noise_shift: shift,
    })
}

/// How the true phase of each trial is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaSampling {
    Fixed(f64),
    /// Uniform over `[lo, hi)`.
    UniformOverRange(f64, f64),
}

impl ThetaSampling {
    /// The range used by the acceptance campaigns: away from the fold points
    /// 0 and π.
    pub fn interior() -> Self {
        Self::UniformOverRange(0.2, PI - 0.2)
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Fixed(t) => Phase::new(t).is_ok(),
            Self::UniformOverRange(lo, hi) => Phase::new(lo).is_ok() && hi > lo && hi <= TAU,
        };
        if ok {
            Ok(())
        } else {
            Err(rfe_core::Error::InvalidInput(format!("theta sampling {self:?} is outside [0, 2π)")).into())
        }
    }

    fn draw(&self, seed: u64) -> Phase {
        let theta = match *self {
            Self::Fixed(t) => t,
            Self::UniformOverRange(lo, hi) => ChaCha8Rng::seed_from_u64(seed).random_range(lo..hi),
        };
        Phase::new(theta).expect("validated range")
    }
}

/// How `|θ̂ - θ|` is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    /// Plain distance on the real line.
    #[default]
    Line,
    /// Distance on the circle of circumference 2π.
    Circular,
}

impl DistanceMode {
    pub fn distance(self, a: f64, b: f64) -> f64 {
        let d = (a - b).abs();
        match self {
            Self::Line => d,
            Self::Circular => d.min(TAU - d),
        }
    }
}

/// Campaign knobs that must not change the results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CampaignOptions {
    /// Worker threads; 0 means all cores.
    pub workers: usize,
    pub distance: DistanceMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessStats {
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub wilson_ci_95: (f64, f64),
    pub epsilon_used: f64,
    pub delta_used: f64,
    pub grid_size: usize,
    pub samples_per_trial: u64,
    pub clamp_events: u64,
}

/// Wilson score interval at 95% for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

/// Runs `f` on a pool of `workers` threads (all cores for 0).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Pool(e.to_string()))?;
    Ok(pool.install(f))
}

/// Seeded success-rate campaign for `estimate_phase`.
pub fn monte_carlo_success(
    query: &BoundsQuery,
    trials: u64,
    theta_sampling: ThetaSampling,
    master_seed: u64,
    options: CampaignOptions,
) -> Result<SuccessStats> {
    if trials == 0 {
        return Err(rfe_core::Error::InvalidInput("trials must be at least 1".into()).into());
    }
    theta_sampling.validate()?;
    let plan = bounds::report(query)?;

    let outcomes: Vec<rfe_core::Result<(bool, u64)>> = with_workers(options.workers, || {
        (0..trials)
            .into_par_iter()
            .map(|i| {
                let trial_seed = derive_seed(master_seed, i);
                let theta = theta_sampling.draw(derive_seed(trial_seed, 0));
                let result = estimate_phase(
                    query.epsilon,
                    query.delta,
                    &query.noise,
                    theta,
                    derive_seed(trial_seed, 1),
                )?;
                let error = options.distance.distance(result.theta_hat, theta.radians());
                Ok((error <= query.epsilon, result.spectrum.clamp_count))
            })
            .collect()
    })?;

    let mut successes = 0;
    let mut clamp_events = 0;
    for outcome in outcomes {
        let (ok, clamps) = outcome?;
        successes += ok as u64;
        clamp_events += clamps;
    }
    Ok(SuccessStats {
        trials,
        successes,
        rate: successes as f64 / trials as f64,
        wilson_ci_95: wilson_interval(successes, trials),
        epsilon_used: query.epsilon,
        delta_used: query.delta,
        grid_size: plan.grid_size,
        samples_per_trial: plan.samples,
        clamp_events,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundViolation {
    pub grid_size: usize,
    pub theta: f64,
    pub index: usize,
    pub class: FrequencyClass,
    pub magnitude: f64,
    pub bound: f64,
}

/// Worst cases found while scanning the close / non-adjacent magnitude
/// bounds. Margins are positive when the bound holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaScanReport {
    pub k_min: usize,
    pub k_max: usize,
    pub theta_points: usize,
    pub close_checked: u64,
    pub non_adjacent_checked: u64,
    pub min_close_magnitude: f64,
    pub max_non_adjacent_magnitude: f64,
    /// `min |f_close| - 2/π`.
    pub close_margin: f64,
    /// `10/(9π) - max |f_non_adjacent|`.
    pub non_adjacent_margin: f64,
    /// `1/(2√2) - max |f_non_adjacent|`.
    pub non_adjacent_sqrt2_margin: f64,
    pub violations: Vec<BoundViolation>,
}

impl LemmaScanReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const BOUND_TOLERANCE: f64 = 1e-12;

/// Checks `|f_close| ≥ 2/π` and `|f_non_adjacent| ≤ 1/(2√2) ≤ 10/(9π)` for
/// every `K` in range and `theta_points` evenly spaced phases in `[0, π]`.
pub fn lemma_bound_scan(k_range: RangeInclusive<usize>, theta_points: usize) -> Result<LemmaScanReport> {
    let (k_min, k_max) = (*k_range.start(), *k_range.end());
    if k_min < 4 || k_max > 1024 || k_min > k_max || theta_points == 0 {
        return Err(rfe_core::Error::InvalidInput(format!(
            "lemma scan needs 4 ≤ K ≤ 1024 and at least one phase, got K ∈ [{k_min}, {k_max}], {theta_points} phases"
        ))
        .into());
    }
    let close_bound = 2.0 / PI;
    let non_adjacent_bound = 10.0 / (9.0 * PI);
    let sqrt2_bound = 1.0 / (2.0 * 2f64.sqrt());

    let per_k: Vec<LemmaScanReport> = (k_min..=k_max)
        .into_par_iter()
        .map(|k| {
            let mut part = LemmaScanReport {
                k_min: k,
                k_max: k,
                theta_points,
                close_checked: 0,
                non_adjacent_checked: 0,
                min_close_magnitude: f64::INFINITY,
                max_non_adjacent_magnitude: 0.0,
                close_margin: 0.0,
                non_adjacent_margin: 0.0,
                non_adjacent_sqrt2_margin: 0.0,
                violations: Vec::new(),
            };
            for i in 0..theta_points {
                let theta_value = if theta_points == 1 {
                    0.0
                } else {
                    PI * i as f64 / (theta_points - 1) as f64
                };
                let theta = Phase::new(theta_value).expect("phase in [0, π]");
                for j in 0..k {
                    let class = classify_frequency(j, theta, k);
                    let magnitude = expected_coefficient(theta, j, k).norm();
                    let mut violated = None;
                    match class {
                        FrequencyClass::Close => {
                            part.close_checked += 1;
                            part.min_close_magnitude = part.min_close_magnitude.min(magnitude);
                            if magnitude < close_bound - BOUND_TOLERANCE {
                                violated = Some(close_bound);
                            }
                        }
                        FrequencyClass::NonAdjacent => {
                            part.non_adjacent_checked += 1;
                            part.max_non_adjacent_magnitude = part.max_non_adjacent_magnitude.max(magnitude);
                            if magnitude > sqrt2_bound + BOUND_TOLERANCE {
                                violated = Some(sqrt2_bound);
                            }
                        }
                        FrequencyClass::AdjacentOnly => {}
                    }
                    if let Some(bound) = violated {
                        part.violations.push(BoundViolation {
                            grid_size: k,
                            theta: theta_value,
                            index: j,
                            class,
                            magnitude,
                            bound,
                        });
                    }
                }
            }
            part
        })
        .collect();

    let mut report = LemmaScanReport {
        k_min,
        k_max,
        theta_points,
        close_checked: 0,
        non_adjacent_checked: 0,
        min_close_magnitude: f64::INFINITY,
        max_non_adjacent_magnitude: 0.0,
        close_margin: 0.0,
        non_adjacent_margin: 0.0,
        non_adjacent_sqrt2_margin: 0.0,
        violations: Vec::new(),
    };
    for part in per_k {
        report.close_checked += part.close_checked;
        report.non_adjacent_checked += part.non_adjacent_checked;
        report.min_close_magnitude = report.min_close_magnitude.min(part.min_close_magnitude);
        report.max_non_adjacent_magnitude = report.max_non_adjacent_magnitude.max(part.max_non_adjacent_magnitude);
        report.violations.extend(part.violations);
    }
    report.close_margin = report.min_close_magnitude - close_bound;
    report.non_adjacent_margin = non_adjacent_bound - report.max_non_adjacent_magnitude;
    report.non_adjacent_sqrt2_margin = sqrt2_bound - report.max_non_adjacent_magnitude;
    Ok(report)
}

/// Which model a sweep varies, and what its parameter means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepFamily {
    /// Parameter is `ε`.
    Ideal,
    /// Parameter is `η̄`.
    Ban(AdversaryStrategy),
    /// Parameter is `σ`.
    Gaussian,
    /// Parameter is `K/T₂`.
    Dephasing,
    /// Parameter is `K/T₂`.
    HighCoherence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: f64,
    /// `None` when the point is past its threshold and was not run.
    pub m_predicted: Option<u64>,
    pub trials: u64,
    pub successes: u64,
    pub rate: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    /// Largest `|η|` the model can produce at this point, where defined.
    pub implied_eta_bar: Option<f64>,
}

/// Settings shared by every point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    pub epsilon: f64,
    pub delta: f64,
    pub trials_per_point: u64,
    pub theta_sampling: ThetaSampling,
    pub master_seed: u64,
}

fn sweep_query(family: &SweepFamily, value: f64, epsilon: f64, delta: f64) -> Result<(BoundsQuery, Option<f64>)> {
    let grid = |eps: f64| bounds::grid_size(eps);
    let t2_from_ratio = |ratio: f64, k: usize| if ratio == 0.0 { f64::INFINITY } else { k as f64 / ratio };
    Ok(match family {
        SweepFamily::Ideal => (BoundsQuery::new(value, delta, NoiseModel::Ideal), Some(0.0)),
        SweepFamily::Ban(strategy) => (
            BoundsQuery::new(
                epsilon,
                delta,
                NoiseModel::Ban {
                    eta_bar: value,
                    strategy: strategy.clone(),
                },
            ),
            Some(value),
        ),
        SweepFamily::Gaussian => {
            let k = grid(epsilon)?;
            (
                BoundsQuery::new(epsilon, delta, NoiseModel::Gaussian { sigma: value }),
                Some(bounds::gaussian_etabar(value, k, delta)),
            )
        }
        SweepFamily::Dephasing => {
            let k = grid(epsilon)?;
            (
                BoundsQuery::new(epsilon, delta, NoiseModel::Dephasing { t2: t2_from_ratio(value, k) }),
                Some(1.0 - (-value).exp()),
            )
        }
        SweepFamily::HighCoherence => {
            let k = grid(epsilon)?;
            (
                BoundsQuery::new(epsilon, delta, NoiseModel::HighCoherence { t2: t2_from_ratio(value, k) }),
                Some(value),
            )
        }
    })
}

/// Success rates and predicted sample counts along one parameter axis.
///
/// Points past their threshold are reported with `m_predicted = None` and
/// are not run. Point `p` uses master seed `derive_seed(master_seed, p)`.
pub fn noise_sweep(
    family: &SweepFamily,
    values: &[f64],
    settings: SweepSettings,
    options: CampaignOptions,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(values.len());
    for (p, &value) in values.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(rfe_core::Error::InvalidInput(format!("sweep value {value} must be non-negative")).into());
        }
        let (query, implied_eta_bar) = sweep_query(family, value, settings.epsilon, settings.delta)?;
        let plan = match bounds::report(&query) {
            Ok(plan) => plan,
            Err(rfe_core::Error::BoundsUnachievable { .. } | rfe_core::Error::NoGuarantee { .. }) => {
                rows.push(SweepRow {
                    parameter: value,
                    m_predicted: None,
                    trials: 0,
                    successes: 0,
                    rate: None,
                    ci_lo: None,
                    ci_hi: None,
                    implied_eta_bar,
                });
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let mut row = SweepRow {
            parameter: value,
            m_predicted: Some(plan.samples),
            trials: 0,
            successes: 0,
            rate: None,
            ci_lo: None,
            ci_hi: None,
            implied_eta_bar,
        };
        if settings.trials_per_point > 0 {
            let stats = monte_carlo_success(
                &query,
                settings.trials_per_point,
                settings.theta_sampling,
                derive_seed(settings.master_seed, p as u64),
                options,
            )?;
            row.trials = stats.trials;
            row.successes = stats.successes;
            row.rate = Some(stats.rate);
            row.ci_lo = Some(stats.wilson_ci_95.0);
            row.ci_hi = Some(stats.wilson_ci_95.1);
        }
        rows.push(row);
    }
    Ok(rows)
}
