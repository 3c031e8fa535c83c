//! The numbered acceptance checks, runnable one at a time or as a bundle.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rfe_core::bounds::{self, BoundsQuery};
use rfe_core::noise::{self, draw_gaussian_run_noise, AdversaryStrategy, DeviationTable, NoiseModel};
use rfe_core::seed::derive_seed;
use rfe_core::spectrum::{dirichlet_kernel, expected_spectrum};
use rfe_core::{run_rfe, Phase, RunConfig};

use crate::error::Result;
use crate::formats::write_spectrum_csv;
use crate::harness::{
    exact_estimator_expectation, lemma_bound_scan, monte_carlo_success, noise_shift, with_workers, CampaignOptions,
    ThetaSampling,
};

/// Criteria whose literal statement cannot hold. They are still run and
/// reported as failures.
pub const KNOWN_UNATTAINABLE: &[u8] = &[8];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Suite {
    All,
    Oracle,
    Lemmas,
    Noiseless,
    Ban,
    Gaussian,
    Thresholds,
    Depth,
    Reductions,
    SingleRun,
}

impl Suite {
    pub fn criteria(self) -> Vec<u8> {
        match self {
            Self::All => (1..=9).collect(),
            Self::Oracle => vec![1],
            Self::Lemmas => vec![2],
            Self::Noiseless => vec![3],
            Self::Ban => vec![4],
            Self::Gaussian => vec![5],
            Self::Thresholds => vec![6],
            Self::Depth => vec![7],
            Self::Reductions => vec![8],
            Self::SingleRun => vec![9],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    /// Informational only; never counts as a failure.
    pub report_only: bool,
    pub detail: String,
    /// File content produced by the check (CSV), if any.
    pub artifact: Option<String>,
}

impl CriterionOutcome {
    fn new(id: u8, title: &str, passed: bool, detail: String) -> Self {
        Self {
            id,
            title: title.to_string(),
            passed,
            report_only: false,
            detail,
            artifact: None,
        }
    }

    /// Whether this outcome should make a verification run fail.
    pub fn is_failure(&self) -> bool {
        !self.passed && !self.report_only
    }
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match (self.report_only, self.passed) {
            (true, _) => "REPORT",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        };
        write!(f, "{status} [{}] {}: {}", self.id, self.title, self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteOptions {
    pub master_seed: u64,
    /// Worker threads; 0 means all cores.
    pub workers: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            master_seed: 1,
            workers: 0,
        }
    }
}

impl SuiteOptions {
    fn campaign(&self) -> CampaignOptions {
        CampaignOptions {
            workers: self.workers,
            ..CampaignOptions::default()
        }
    }

    fn seed_for(&self, id: u8) -> u64 {
        derive_seed(self.master_seed, id as u64)
    }
}

pub fn run_suite(suite: Suite, options: &SuiteOptions) -> Result<Vec<CriterionOutcome>> {
    suite.criteria().into_iter().map(|id| run_criterion(id, options)).collect()
}

pub fn run_criterion(id: u8, options: &SuiteOptions) -> Result<CriterionOutcome> {
    match id {
        1 => oracle_equivalence(options),
        2 => kernel_bounds(options),
        3 => noiseless_campaign(options),
        4 => ban_campaign(options),
        5 => gaussian_campaign(options),
        6 => threshold_constants(),
        7 => depth_accounting(options),
        8 => noiseless_reductions(),
        9 => single_run_report(options),
        _ => Err(rfe_core::Error::InvalidInput(format!("no acceptance criterion {id}")).into()),
    }
}

fn oracle_equivalence(options: &SuiteOptions) -> Result<CriterionOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed_for(1));
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let theta = Phase::new(rng.random_range(0.0..TAU))?;
        let grid = rng.random_range(1..=256);
        let oracle = exact_estimator_expectation(theta, grid, None)?;
        let closed = expected_spectrum(theta, grid);
        for (a, b) in oracle.coefficients.iter().zip(&closed.coefficients) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(CriterionOutcome::new(
        1,
        "enumeration oracle matches closed-form expectation",
        worst <= 1e-12,
        format!("100 random (θ, K ≤ 256) pairs, max |oracle - closed form| = {worst:.3e} (tolerance 1e-12)"),
    ))
}

fn kernel_bounds(options: &SuiteOptions) -> Result<CriterionOutcome> {
    let report = with_workers(options.workers, || lemma_bound_scan(4..=128, 1000))??;
    let asymptote = (dirichlet_kernel(0.5, 1000) - 2.0 / PI).abs();
    let passed = report.passed()
        && report.close_margin >= -1e-12
        && report.non_adjacent_margin >= -1e-12
        && report.non_adjacent_sqrt2_margin >= -1e-12
        && asymptote <= 1e-4;
    Ok(CriterionOutcome::new(
        2,
        "close / non-adjacent magnitude bounds",
        passed,
        format!(
            "K ∈ [4, 128], 1000 phases: {} violations; min close |f| = {:.12} (2/π margin {:.3e}); \
             max non-adjacent |f| = {:.12} (1/(2√2) margin {:.3e}, 10/(9π) margin {:.3e}); \
             |S_1000(0.5) - 2/π| = {asymptote:.3e}",
            report.violations.len(),
            report.min_close_magnitude,
            report.close_margin,
            report.max_non_adjacent_magnitude,
            report.non_adjacent_sqrt2_margin,
            report.non_adjacent_margin,
        ),
    ))
}

fn noiseless_campaign(options: &SuiteOptions) -> Result<CriterionOutcome> {
    let query = BoundsQuery::new(0.1, 0.1, NoiseModel::Ideal);
    let stats = monte_carlo_success(&query, 500, ThetaSampling::interior(), options.seed_for(3), options.campaign())?;
    let sizes_ok = stats.grid_size == 63 && stats.samples_per_trial == 3130;
    Ok(CriterionOutcome::new(
        3,
        "noiseless success rate, ε = δ = 0.1",
        sizes_ok && stats.rate >= 0.9,
        format!(
            "K = {}, M = {}; {}/{} successes, rate {:.4}, 95% CI [{:.4}, {:.4}] (need ≥ 0.90)",
            stats.grid_size,
            stats.samples_per_trial,
            stats.successes,
            stats.trials,
            stats.rate,
            stats.wilson_ci_95.0,
            stats.wilson_ci_95.1
        ),
    ))
}

fn ban_campaign(options: &SuiteOptions) -> Result<CriterionOutcome> {
    let noise = NoiseModel::Ban {
        eta_bar: 0.05,
        strategy: AdversaryStrategy::SignFlip,
    };
    let query = BoundsQuery::new(0.1, 0.1, noise);
    let plan = bounds::report(&query)?;
    let table_factor = (1.0 - bounds::ban_slope() * 0.05).powi(-2);
    let inflation_ok = (plan.inflation_factor - 3.997).abs() <= 1e-3 && (plan.inflation_factor - table_factor).abs() <= 1e-12;

    // Approach the threshold from below: M must grow without bound.
    let threshold = noise::ban_threshold();
    let approach: Vec<f64> = (1..=8)
        .map(|n| bounds::samples_ban_real(0.1, 0.1, threshold * (1.0 - 10f64.powi(-n))))
        .collect::<rfe_core::Result<_>>()?;
    let increasing = approach.windows(2).all(|w| w[1] > w[0]);
    let diverges = approach.last().is_some_and(|&m| m > 1e18);
    let rejected = bounds::samples_ban(0.1, 0.1, threshold).is_err();

    let stats = monte_carlo_success(&query, 300, ThetaSampling::interior(), options.seed_for(4), options.campaign())?;
    let passed = plan.samples == 12510 && plan.grid_size == 63 && inflation_ok && increasing && diverges && rejected && stats.rate >= 0.9;
    Ok(CriterionOutcome::new(
        4,
        "bounded adversary η̄ = 0.05 (sign flip)",
        passed,
        format!(
            "M = {}, inflation {:.9} (table form {:.9}); M at η̄ = thr·(1 - 1e-8) is {:.3e}, strictly increasing: {increasing}, \
             threshold rejected: {rejected}; {}/{} successes, rate {:.4}, 95% CI [{:.4}, {:.4}], clamps {}",
            plan.samples,
            plan.inflation_factor,
            table_factor,
            approach.last().copied().unwrap_or(f64::NAN),
            stats.successes,
            stats.trials,
            stats.rate,
            stats.wilson_ci_95.0,
            stats.wilson_ci_95.1,
            stats.clamp_events
        ),
    ))
}

/// Largest relative gap between the sample variance of `η̂ⱼ` and `2σ²/K`
/// over all `j`.
pub fn shift_variance_check(sigma: f64, grid: usize, draws: u64, seed: u64, workers: usize) -> Result<(f64, f64)> {
    let sums = with_workers(workers, || {
        (0..draws)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i));
                let table: DeviationTable = draw_gaussian_run_noise(sigma, grid, false, &mut rng);
                let shift = noise_shift(&table, grid);
                let first: Vec<_> = shift.clone();
                let second: Vec<f64> = shift.iter().map(|z| z.norm_sqr()).collect();
                (first, second)
            })
            .reduce(
                || (vec![rfe_core::Complex64::new(0.0, 0.0); grid], vec![0.0; grid]),
                |(mut a1, mut a2), (b1, b2)| {
                    for j in 0..grid {
                        a1[j] += b1[j];
                        a2[j] += b2[j];
                    }
                    (a1, a2)
                },
            )
    })?;
    let n = draws as f64;
    let expected = noise::gaussian_shift_variance(sigma, grid, false);
    let worst = (0..grid)
        .map(|j| {
            let mean = sums.0[j] / n;
            let var = (sums.1[j] / n - mean.norm_sqr()) * n / (n - 1.0);
            (var / expected - 1.0).abs()
        })
        .fold(0.0, f64::max);
    Ok((worst, expected))
}

fn gaussian_campaign(options: &SuiteOptions) -> Result<CriterionOutcome> {
    let query = BoundsQuery::new(0.1, 0.1, NoiseModel::Gaussian { sigma: 0.1 });
    let stats = monte_carlo_success(&query, 300, ThetaSampling::interior(), options.seed_for(5), options.campaign())?;
    let (worst, expected) = shift_variance_check(0.1, 63, 100_000, derive_seed(options.seed_for(5), u64::MAX), options.workers)?;
    let m_ok = stats.samples_per_trial == bounds::samples_gaussian(0.1, 0.1, 0.1)?;
    Ok(CriterionOutcome::new(
        5,
        "Gaussian noise σ = 0.1",
        m_ok && stats.rate >= 0.9 && worst <= 0.05,
        format!(
            "M = {}; {}/{} successes, rate {:.4}, 95% CI [{:.4}, {:.4}]; Var(η̂ⱼ) over 1e5 tables at K = 63 within {:.2}% \
             of 2σ²/K = {expected:.6e} for every j (need ≤ 5%)",
            stats.samples_per_trial,
            stats.successes,
            stats.trials,
            stats.rate,
            stats.wilson_ci_95.0,
            stats.wilson_ci_95.1,
            100.0 * worst
        ),
    ))
}

fn threshold_constants() -> Result<CriterionOutcome> {
    let ban = noise::ban_threshold();
    let stated = noise::dephasing_ratio_threshold_paper();
    let derived = noise::dephasing_ratio_threshold_derived();
    let closed = -(1.0 - 4.0 * SQRT_2 / (9.0 * PI)).ln();
    let passed = (ban - 0.100035).abs() <= 1e-6
        && (stated - 0.916).abs() <= 1e-3
        && (derived - 0.223).abs() <= 1e-3
        && (derived - closed).abs() <= 1e-12;
    Ok(CriterionOutcome::new(
        6,
        "threshold constants",
        passed,
        format!(
            "η̄ threshold {ban:.9}; K/T₂ threshold stated {stated:.6}, re-derived {derived:.6} \
             (discrepancy ×{:.3}: the stated value follows from 1/2 - η̄ = e^(-K/T₂), \
             the re-derived one from (1 - e^(-K/T₂))/2 = η̄)",
            stated / derived
        ),
    ))
}

fn depth_accounting(options: &SuiteOptions) -> Result<CriterionOutcome> {
    let result = run_rfe(&RunConfig {
        samples: 100_000,
        grid_size: 63,
        theta: Phase::new(1.0)?,
        noise: NoiseModel::Ideal,
        seed: options.seed_for(7),
    })?;
    let mean = result.spectrum.total_depth as f64 / result.spectrum.samples_used as f64;
    let grid = bounds::grid_size(0.1)?;
    let per_sample = (grid as f64 - 1.0) / 2.0;
    let table = PI / 0.1;
    let rel = (per_sample / table - 1.0).abs();
    Ok(CriterionOutcome::new(
        7,
        "depth accounting",
        (mean - 31.0).abs() <= 0.3 && rel <= 0.02,
        format!(
            "mean depth over 1e5 samples at K = 63 is {mean:.4} (need 31 ± 0.3); (K-1)/2 = {per_sample} vs π/ε = {table:.4}, \
             off by {:.2}% (need ≤ 2%)",
            100.0 * rel
        ),
    ))
}

fn noiseless_reductions() -> Result<CriterionOutcome> {
    let mut count_mismatches = Vec::new();
    for &eps in &[0.02, 0.05, 0.1, 0.3, 1.0] {
        for &delta in &[0.01, 0.05, 0.1, 0.3] {
            let ban = bounds::samples_ban(eps, delta, 0.0)?;
            let ideal = bounds::samples_noiseless(eps, delta)?;
            if ban != ideal {
                count_mismatches.push((eps, delta, ban, ideal));
            }
        }
    }

    let grid = 63;
    let gaussian_zero = draw_gaussian_run_noise(0.0, grid, false, &mut ChaCha8Rng::seed_from_u64(0));
    let table_ok = gaussian_zero == DeviationTable::zeros(grid);
    let exact_models: Vec<NoiseModel> = [
        AdversaryStrategy::Zero,
        AdversaryStrategy::ConstantPlus,
        AdversaryStrategy::ConstantMinus,
        AdversaryStrategy::SignFlip,
    ]
    .into_iter()
    .map(|strategy| NoiseModel::Ban { eta_bar: 0.0, strategy })
    .chain([NoiseModel::Gaussian { sigma: 0.0 }])
    .collect();
    let dephasing = NoiseModel::Dephasing { t2: 1e9 };

    let mut exact_worst: f64 = 0.0;
    let mut dephasing_worst: f64 = 0.0;
    for i in 0..64 {
        let theta = Phase::new(i as f64 * TAU / 64.0 + 0.013)?;
        for k in 0..grid {
            let (ix, iy) = NoiseModel::Ideal.bias(theta, k, None)?;
            for model in &exact_models {
                let (bx, by) = model.bias(theta, k, Some(&gaussian_zero))?;
                exact_worst = exact_worst.max((bx - ix).abs()).max((by - iy).abs());
            }
            let (bx, by) = dephasing.bias(theta, k, None)?;
            dephasing_worst = dephasing_worst.max((bx - ix).abs()).max((by - iy).abs());
        }
    }

    let counts_ok = count_mismatches.is_empty();
    let exact_ok = exact_worst <= 1e-12;
    let dephasing_ok = dephasing_worst <= 1e-12;
    Ok(CriterionOutcome::new(
        8,
        "noiseless-limit reductions",
        counts_ok && table_ok && exact_ok && dephasing_ok,
        format!(
            "samples_ban(ε, δ, 0) = samples_noiseless on 20 pairs: {counts_ok}; σ = 0 draws an all-zero table: {table_ok}; BAN{{0}} and Gaussian{{0}} max bias gap {exact_worst:.3e}; \
             Dephasing{{T₂ = 1e9}} max bias gap over k < {grid} is {dephasing_worst:.3e} (need ≤ 1e-12; \
             1 - e^(-k/T₂) ≈ k·1e-9 makes this unattainable for k ≥ 1)"
        ),
    ))
}

fn single_run_report(options: &SuiteOptions) -> Result<CriterionOutcome> {
    let theta = Phase::new(2.25)?;
    let epsilon = 0.08;
    let grid = bounds::grid_size(epsilon)?;
    let config = |seed| RunConfig {
        samples: 80,
        grid_size: grid,
        theta,
        noise: NoiseModel::Ideal,
        seed,
    };
    let example = run_rfe(&config(7))?;
    let expected = expected_spectrum(theta, grid);
    let mut csv = Vec::new();
    write_spectrum_csv(&mut csv, &example.spectrum.coefficients, Some(&expected.coefficients))?;

    let master = options.seed_for(9);
    let successes = (0..200u64)
        .map(|i| run_rfe(&config(derive_seed(master, i))).map(|r| (r.theta_hat - 2.25).abs() <= epsilon))
        .collect::<rfe_core::Result<Vec<bool>>>()?
        .into_iter()
        .filter(|&ok| ok)
        .count();
    let mut outcome = CriterionOutcome::new(
        9,
        "single-run spectrum, θ = 2.25, ε = 0.08, M = 80",
        true,
        format!(
            "K = {grid}; seed 7 gives θ̂ = {:.6} (index {}, |error| {:.4}); success rate over 200 seeds {:.3}",
            example.theta_hat,
            example.winning_index,
            (example.theta_hat - 2.25).abs(),
            successes as f64 / 200.0
        ),
    );
    outcome.report_only = true;
    outcome.artifact = Some(String::from_utf8(csv).expect("csv output is UTF-8"));
    Ok(outcome)
}
