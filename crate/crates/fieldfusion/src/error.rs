//! Library-wide error type.
//!
//! Variants are grouped the way the CLI maps them to exit codes: parameter
//! and configuration problems, data/format problems, and numerical failures
//! (which carry enough context to locate the failing chain and step).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument to an operation (bad range, empty batch, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Invalid or inconsistent run configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Tensor shapes do not line up.
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    /// Sensor layout is inconsistent with the field it reads.
    #[error("invalid sensor layout: {0}")]
    Layout(String),

    /// On-disk artifact is malformed.
    #[error("format error in {path}: {reason}")]
    Format { path: String, reason: String },

    /// A required artifact (dataset, checkpoint) is missing.
    #[error("missing artifact: {0}")]
    MissingArtifact(String),

    /// Normalization statistics are degenerate (stddev below 1e-12).
    #[error("degenerate statistics: channel {channel} has stddev {sigma}")]
    DegenerateStats { channel: usize, sigma: f64 },

    /// The WMAPE denominator vanished (all-zero ground truth).
    #[error("undefined metric: ground truth is identically zero")]
    UndefinedMetric,

    /// Non-finite value produced while sampling.
    #[error("numerical failure at step t={step} (chain {chain}): {reason}")]
    Numerical {
        step: usize,
        chain: usize,
        reason: String,
    },

    /// Non-finite loss while training.
    #[error("training diverged at step {step}: loss is not finite")]
    Training { step: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn shape(expected: impl Into<String>, got: impl Into<String>) -> Self {
        Error::Shape {
            expected: expected.into(),
            got: got.into(),
        }
    }

    /// Exit-code class used by the command-line frontend:
    /// 1 = usage, 2 = data/format, 3 = numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Config(_) => 1,
            Error::Shape { .. }
            | Error::Layout(_)
            | Error::Format { .. }
            | Error::MissingArtifact(_)
            | Error::DegenerateStats { .. }
            | Error::UndefinedMetric
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::Numerical { .. } | Error::Training { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
