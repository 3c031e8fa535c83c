use alloc::string::String;

/// Everything that can go wrong inside the estimator and its calculators.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite Hadamard-test bias (bx = {bx}, by = {by})")]
    NonFiniteBias { bx: f64, by: f64 },

    #[error("noise model `{model}` needs a per-run deviation table but none was supplied")]
    MissingRunNoise { model: &'static str },

    #[error("deviation table has {len} entries but time index {k} was requested")]
    DeviationTableTooShort { len: usize, k: usize },

    #[error("{parameter} = {value} is at or above its threshold {threshold}; no success guarantee exists")]
    BoundsUnachievable {
        parameter: &'static str,
        value: f64,
        threshold: f64,
    },

    #[error("noise model `{model}` has no sample-complexity guarantee; run the estimator with explicit M and K instead")]
    NoGuarantee { model: &'static str },
}
