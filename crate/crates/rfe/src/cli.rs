//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification check fails, 2 on invalid
//! input. JSON outputs embed the resolved [`CliConfig`] so a result file
//! records how it was produced.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use rfe_core::bounds::{self, BoundsQuery, BoundsReport, DerivationCheck, HighCoherenceReport};
use rfe_core::noise::AdversaryStrategy;
use rfe_core::seed::derive_seed;
use rfe_core::spectrum::expected_spectrum;
use rfe_core::{estimate_phase, run_rfe, NoiseModel, Phase, RunConfig, TrialResult};

use crate::error::{Error, Result};
use crate::formats::{write_json, write_spectrum_csv, write_sweep_csv};
use crate::harness::{
    monte_carlo_success, noise_sweep, CampaignOptions, DistanceMode, SuccessStats, SweepFamily, SweepRow,
    SweepSettings, ThetaSampling,
};
use crate::suites::{run_suite, CriterionOutcome, Suite, SuiteOptions};

pub const SEED_ENV: &str = "RFE_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RandomLiteral {
    Random,
}

/// `--theta`: a phase in radians, or `random` for a uniform draw from
/// `[0.2, π - 0.2)` seeded by `--seed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaArg {
    Value(f64),
    Random(#[serde(with = "random_literal")] ()),
}

mod random_literal {
    use super::RandomLiteral;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(_: &(), s: S) -> Result<S::Ok, S::Error> {
        RandomLiteral::Random.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        RandomLiteral::deserialize(d).map(|_| ())
    }
}

impl ThetaArg {
    pub const RANDOM: Self = Self::Random(());

    fn sampling(self) -> ThetaSampling {
        match self {
            Self::Value(t) => ThetaSampling::Fixed(t),
            Self::Random(()) => ThetaSampling::interior(),
        }
    }

    fn resolve(self, seed: u64) -> Result<Phase> {
        let t = match self {
            Self::Value(t) => t,
            Self::Random(()) => ChaCha8Rng::seed_from_u64(derive_seed(seed, 0)).random_range(0.2..std::f64::consts::PI - 0.2),
        };
        Ok(Phase::new(t)?)
    }
}

impl FromStr for ThetaArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("random") {
            return Ok(Self::RANDOM);
        }
        let t: f64 = s.parse().map_err(|_| format!("expected a phase in radians or `random`, got `{s}`"))?;
        Phase::new(t).map_err(|e| e.to_string())?;
        Ok(Self::Value(t))
    }
}

fn parse_noise(s: &str) -> std::result::Result<NoiseModel, String> {
    let model: NoiseModel = serde_json::from_str(s).map_err(|e| {
        format!(
            "malformed noise JSON ({e}); expected e.g. {{\"kind\":\"ban\",\"eta_bar\":0.05,\"strategy\":\"sign_flip\"}}"
        )
    })?;
    model.validate().map_err(|e| e.to_string())?;
    Ok(model)
}

fn parse_strategy(s: &str) -> std::result::Result<AdversaryStrategy, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown strategy `{s}`; use zero, constant_plus, constant_minus or sign_flip"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum FamilyArg {
    Ideal,
    Ban,
    Gaussian,
    Dephasing,
    HighCoherence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SubcommandName {
    Run,
    Sweep,
    Bounds,
    Spectrum,
    Verify,
}

#[derive(Debug, Parser)]
#[command(name = "rfe", version, about = "Randomized Fourier phase estimation: simulate, size and verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Target accuracy ε in radians.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Failure probability δ.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// True phase in radians, or `random`.
    #[arg(long, default_value = "random")]
    theta: ThetaArg,
    /// Noise model as JSON, e.g. '{"kind":"gaussian","sigma":0.1}'.
    #[arg(long, default_value = r#"{"kind":"ideal"}"#, value_parser = parse_noise)]
    noise: NoiseModel,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// Master seed; the RFE_SEED environment variable takes precedence.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads (0 = all cores). Never changes results.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Write results here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the estimator once, or measure its success rate over --trials runs.
    Run {
        #[command(flatten)]
        common: Common,
        /// Sample count M; with --grid, bypasses the bounds calculator.
        #[arg(long, requires = "grid")]
        samples: Option<u64>,
        /// Grid size K.
        #[arg(long, requires = "samples")]
        grid: Option<usize>,
        #[arg(long, value_enum, default_value_t = DistanceMode::Line)]
        distance: DistanceMode,
    },
    /// Success rate and predicted M along one noise parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Comma-separated parameter values: ε for ideal, η̄ for ban, σ for
        /// gaussian, K/T₂ for dephasing and high_coherence.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Adversary for the ban family.
        #[arg(long, default_value = "sign_flip", value_parser = parse_strategy)]
        strategy: AdversaryStrategy,
        #[arg(long, value_enum, default_value_t = DistanceMode::Line)]
        distance: DistanceMode,
    },
    /// Grid size, sample count and thresholds for a target accuracy.
    Bounds {
        #[command(flatten)]
        common: Common,
    },
    /// Estimated spectrum of one run as CSV (or JSON).
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Sample count M.
        #[arg(long, default_value_t = 80)]
        samples: u64,
        /// Grid size K; defaults to ⌈2π/ε⌉.
        #[arg(long)]
        grid: Option<usize>,
        /// Add the exact expected coefficients next to the estimates.
        #[arg(long)]
        with_expected: bool,
    },
    /// Run the acceptance checks.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Directory for files produced by the checks.
        #[arg(long)]
        artifacts: Option<PathBuf>,
    },
}

/// Everything that determines a result, after defaults and the seed
/// override are applied. `--workers` is excluded since it cannot change any
/// output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliConfig {
    pub subcommand: SubcommandName,
    pub epsilon: f64,
    pub delta: f64,
    pub theta: ThetaArg,
    pub noise: NoiseModel,
    pub trials: u64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<DistanceMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<AdversaryStrategy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub with_expected: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub artifacts: Option<PathBuf>,
}

impl CliConfig {
    fn base(subcommand: SubcommandName, common: &Common, default_format: Format, seed_override: Option<u64>) -> Self {
        Self {
            subcommand,
            epsilon: common.epsilon,
            delta: common.delta,
            theta: common.theta,
            noise: common.noise.clone(),
            trials: common.trials,
            seed: seed_override.unwrap_or(common.seed),
            output: common.output.clone(),
            format: common.format.unwrap_or(default_format),
            samples: None,
            grid: None,
            distance: None,
            family: None,
            values: None,
            strategy: None,
            with_expected: None,
            suite: None,
            artifacts: None,
        }
    }

    /// Checks every value against what the commands downstream accept.
    pub fn validate(&self) -> Result<()> {
        let usage = |m: String| Err(Error::Usage(m));
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return usage(format!("--epsilon must be a positive number, got {}", self.epsilon));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return usage(format!("--delta must lie strictly between 0 and 1, got {}", self.delta));
        }
        if self.trials == 0 {
            return usage("--trials must be at least 1".into());
        }
        if let ThetaArg::Value(t) = self.theta {
            Phase::new(t)?;
        }
        self.noise.validate()?;
        if self.samples == Some(0) {
            return usage("--samples must be at least 1".into());
        }
        if self.grid == Some(0) {
            return usage("--grid must be at least 1".into());
        }
        let csv_ok = matches!(self.subcommand, SubcommandName::Run | SubcommandName::Sweep | SubcommandName::Spectrum);
        if self.format == Format::Csv && !csv_ok {
            return usage(format!("--format csv is not available for {:?}; use json", self.subcommand).to_lowercase());
        }
        if self.subcommand == SubcommandName::Run && self.format == Format::Csv && self.trials > 1 {
            return usage("--format csv writes a single spectrum; use --trials 1 or --format json".into());
        }
        if self.subcommand == SubcommandName::Run && self.trials > 1 && self.samples.is_some() {
            return usage("--samples/--grid apply to single runs; drop them or use --trials 1".into());
        }
        if let Some(values) = &self.values {
            if values.is_empty() || values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return usage("--values must be non-negative numbers".into());
            }
        }
        Ok(())
    }
}

/// JSON envelope: the config followed by the command's own fields.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    config: &'a CliConfig,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct RunBody<'a> {
    theta: f64,
    #[serde(flatten)]
    result: &'a TrialResult,
}

#[derive(Serialize)]
struct BoundsBody<'a> {
    #[serde(flatten)]
    report: &'a BoundsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    derivation_check: Option<DerivationCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    high_coherence: Option<HighCoherenceReport>,
}

#[derive(Serialize)]
struct SweepBody<'a> {
    rows: &'a [SweepRow],
}

#[derive(Serialize)]
struct SpectrumBody<'a> {
    theta: f64,
    grid_size: usize,
    #[serde(flatten)]
    result: &'a TrialResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected: Option<&'a [rfe_core::Complex64]>,
}

#[derive(Serialize)]
struct VerifyBody<'a> {
    passed: bool,
    criteria: &'a [CriterionOutcome],
}

fn seed_override() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Usage(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(std::env::VarError::NotUnicode(_)) => Err(Error::Usage(format!("{SEED_ENV} is not valid UTF-8"))),
    }
}

fn open_output(config: &CliConfig) -> Result<Box<dyn Write>> {
    Ok(match &config.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_json<T: Serialize>(config: &CliConfig, body: T) -> Result<()> {
    write_json(open_output(config)?, &Envelope { config, body })
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let started = Instant::now();
    let code = match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    };
    eprintln!("elapsed: {:.3} s", started.elapsed().as_secs_f64());
    code
}

fn execute(command: Command) -> Result<i32> {
    let seed = seed_override()?;
    match command {
        Command::Run {
            common,
            samples,
            grid,
            distance,
        } => {
            let mut config = CliConfig::base(SubcommandName::Run, &common, Format::Json, seed);
            config.samples = samples;
            config.grid = grid;
            config.distance = Some(distance);
            config.validate()?;
            cmd_run(&config, common.workers)
        }
        Command::Sweep {
            common,
            family,
            values,
            strategy,
            distance,
        } => {
            let mut config = CliConfig::base(SubcommandName::Sweep, &common, Format::Csv, seed);
            config.family = Some(family);
            config.values = Some(values);
            config.strategy = (family == FamilyArg::Ban).then_some(strategy);
            config.distance = Some(distance);
            config.validate()?;
            cmd_sweep(&config, common.workers)
        }
        Command::Bounds { common } => {
            let config = CliConfig::base(SubcommandName::Bounds, &common, Format::Json, seed);
            config.validate()?;
            cmd_bounds(&config)
        }
        Command::Spectrum {
            common,
            samples,
            grid,
            with_expected,
        } => {
            let mut config = CliConfig::base(SubcommandName::Spectrum, &common, Format::Csv, seed);
            config.samples = Some(samples);
            config.grid = grid;
            config.with_expected = Some(with_expected);
            config.validate()?;
            cmd_spectrum(&config)
        }
        Command::Verify {
            common,
            suite,
            artifacts,
        } => {
            let mut config = CliConfig::base(SubcommandName::Verify, &common, Format::Json, seed);
            config.suite = Some(suite);
            config.artifacts = artifacts;
            config.validate()?;
            cmd_verify(&config, common.workers)
        }
    }
}

fn cmd_run(config: &CliConfig, workers: usize) -> Result<i32> {
    if config.trials > 1 {
        let query = BoundsQuery::new(config.epsilon, config.delta, config.noise.clone());
        let options = CampaignOptions {
            workers,
            distance: config.distance.unwrap_or_default(),
        };
        let stats: SuccessStats = monte_carlo_success(&query, config.trials, config.theta.sampling(), config.seed, options)?;
        emit_json(config, &stats)?;
        return Ok(EXIT_OK);
    }
    let theta = config.theta.resolve(config.seed)?;
    let estimator_seed = derive_seed(config.seed, 1);
    let result = match (config.samples, config.grid) {
        (Some(samples), Some(grid_size)) => run_rfe(&RunConfig {
            samples,
            grid_size,
            theta,
            noise: config.noise.clone(),
            seed: estimator_seed,
        })?,
        _ => estimate_phase(config.epsilon, config.delta, &config.noise, theta, estimator_seed)?,
    };
    match config.format {
        Format::Json => emit_json(
            config,
            RunBody {
                theta: theta.radians(),
                result: &result,
            },
        )?,
        Format::Csv => write_spectrum_csv(open_output(config)?, &result.spectrum.coefficients, None)?,
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(config: &CliConfig, workers: usize) -> Result<i32> {
    let family = match config.family.expect("set by execute") {
        FamilyArg::Ideal => SweepFamily::Ideal,
        FamilyArg::Ban => SweepFamily::Ban(config.strategy.clone().unwrap_or(AdversaryStrategy::SignFlip)),
        FamilyArg::Gaussian => SweepFamily::Gaussian,
        FamilyArg::Dephasing => SweepFamily::Dephasing,
        FamilyArg::HighCoherence => SweepFamily::HighCoherence,
    };
    let settings = SweepSettings {
        epsilon: config.epsilon,
        delta: config.delta,
        trials_per_point: config.trials,
        theta_sampling: config.theta.sampling(),
        master_seed: config.seed,
    };
    let options = CampaignOptions {
        workers,
        distance: config.distance.unwrap_or_default(),
    };
    let rows = noise_sweep(&family, config.values.as_deref().unwrap_or_default(), settings, options)?;
    match config.format {
        Format::Csv => write_sweep_csv(open_output(config)?, &rows)?,
        Format::Json => emit_json(config, SweepBody { rows: &rows })?,
    }
    Ok(EXIT_OK)
}

fn cmd_bounds(config: &CliConfig) -> Result<i32> {
    let report = bounds::report(&BoundsQuery::new(config.epsilon, config.delta, config.noise.clone()))?;
    let derivation_check = match config.noise {
        NoiseModel::Gaussian { sigma } if !report.trivial => Some(bounds::derivation_check(config.epsilon, config.delta, sigma)?),
        _ => None,
    };
    let high_coherence = match config.noise {
        NoiseModel::Dephasing { .. } | NoiseModel::HighCoherence { .. } if !report.trivial => {
            Some(bounds::high_coherence_report(config.epsilon)?)
        }
        _ => None,
    };
    emit_json(
        config,
        BoundsBody {
            report: &report,
            derivation_check,
            high_coherence,
        },
    )?;
    Ok(EXIT_OK)
}

fn cmd_spectrum(config: &CliConfig) -> Result<i32> {
    let grid_size = match config.grid {
        Some(k) => k,
        None => bounds::grid_size(config.epsilon)?,
    };
    let theta = match config.theta {
        ThetaArg::Value(t) => Phase::new(t)?,
        random => random.resolve(config.seed)?,
    };
    // A fixed phase uses the seed directly, so `--seed 7` means run seed 7.
    let run_seed = match config.theta {
        ThetaArg::Value(_) => config.seed,
        ThetaArg::Random(()) => derive_seed(config.seed, 1),
    };
    let result = run_rfe(&RunConfig {
        samples: config.samples.unwrap_or(80),
        grid_size,
        theta,
        noise: config.noise.clone(),
        seed: run_seed,
    })?;
    let expected = config
        .with_expected
        .unwrap_or(false)
        .then(|| expected_spectrum(theta, grid_size).coefficients);
    match config.format {
        Format::Csv => write_spectrum_csv(open_output(config)?, &result.spectrum.coefficients, expected.as_deref())?,
        Format::Json => emit_json(
            config,
            SpectrumBody {
                theta: theta.radians(),
                grid_size,
                result: &result,
                expected: expected.as_deref(),
            },
        )?,
    }
    Ok(EXIT_OK)
}

fn cmd_verify(config: &CliConfig, workers: usize) -> Result<i32> {
    let options = SuiteOptions {
        master_seed: config.seed,
        workers,
    };
    let outcomes = run_suite(config.suite.unwrap_or(Suite::All), &options)?;
    for outcome in &outcomes {
        eprintln!("{outcome}");
    }
    if let Some(dir) = &config.artifacts {
        std::fs::create_dir_all(dir)?;
        for outcome in &outcomes {
            if let Some(content) = &outcome.artifact {
                std::fs::write(dir.join(format!("criterion_{}.csv", outcome.id)), content)?;
            }
        }
    }
    let passed = !outcomes.iter().any(CriterionOutcome::is_failure);
    emit_json(
        config,
        VerifyBody {
            passed,
            criteria: &outcomes,
        },
    )?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}
