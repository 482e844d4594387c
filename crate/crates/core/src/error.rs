//! Error type shared by all core modules.

/// Errors produced by validation, integration, and training.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural parameter set fails its invariants.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The chasing wave is not faster than the target, so no collision occurs.
    #[error("no collision: speed {v} does not exceed encoding-wave speed {v_n}")]
    NoCollision { v: f64, v_n: f64 },

    /// Time integration blew up or drifted past the safety threshold.
    #[error("integration failed at step {step} (t = {time}): {reason}")]
    Unstable {
        step: usize,
        time: f64,
        reason: String,
    },

    /// A diagnostic could not be computed from the data provided.
    #[error("diagnostic error: {0}")]
    Diagnostic(String),

    /// Matrix or vector dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A matrix is numerically singular for the requested direct solve.
    #[error("singular matrix: condition number {cond:.3e} exceeds {limit:.1e}")]
    Singular { cond: f64, limit: f64 },

    /// Training finished but the fit misses the requested tolerance.
    #[error("training residual {residual:.3e} exceeds tolerance {tolerance:.1e}")]
    TrainingFailed { residual: f64, tolerance: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
