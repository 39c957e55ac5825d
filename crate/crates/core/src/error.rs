use thiserror::Error;

/// Errors raised by model construction and the structural checks.
///
/// The leading word of every message names the failure class so that the
/// command-line front end can surface it verbatim.
#[derive(Debug, Error)]
pub enum Error {
    #[error("MonotonicityError: n_{next} = {next_dim} exceeds n_{level} = {dim}")]
    Monotonicity {
        level: usize,
        next: usize,
        dim: usize,
        next_dim: usize,
    },

    #[error("EnergyOrderError: {0}")]
    EnergyOrder(String),

    #[error("FrequencyClashError: {first} and {second} both equal {value}")]
    FrequencyClash {
        first: String,
        second: String,
        value: f64,
    },

    #[error("IndexError: {0}")]
    Index(String),

    #[error("ShapeError: expected {expected}, found {found}")]
    Shape { expected: String, found: String },

    #[error("SizeError: dimension {dim} exceeds the limit {limit}")]
    Size { dim: usize, limit: usize },

    #[error("ToleranceError: {0}")]
    Tolerance(String),

    #[error("SupportError: {0}")]
    Support(String),

    #[error("ZeroStateError: seed state is zero")]
    ZeroState,

    #[error("DegenerateError: {0}")]
    Degenerate(String),

    #[error("CommutationError: residual {residual:e} exceeds {tol:e}")]
    Commutation { residual: f64, tol: f64 },

    #[error("RangeError: {0}")]
    Range(String),

    #[error("RateError: {0}")]
    Rate(String),

    #[error("InvalidInput: {0}")]
    InvalidInput(String),

    #[error("InvalidState: {0}")]
    InvalidState(String),

    #[error("ConfigError: {0}")]
    Config(String),

    #[error("LinalgError: {0}")]
    Linalg(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
