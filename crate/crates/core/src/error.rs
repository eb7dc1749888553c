use std::path::PathBuf;

use thiserror::Error;

use crate::level::AutomationLevel;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("registration series has no entry for year {year}")]
    MissingYear { year: i32 },

    #[error("registration series has gaps, missing years: {}", format_years(.missing))]
    Gap { missing: Vec<i32> },

    #[error("registration series lists year {year} more than once")]
    DuplicateYear { year: i32 },

    #[error("non-positive registration count {count} for year {year}")]
    NonPositiveCount { year: i32, count: f64 },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(
        "target share {target} at year {year} is not bracketed by q in [{q_lo}, {q_hi}] \
         (shares {share_lo:.6} .. {share_hi:.6})"
    )]
    Bracket {
        year: i32,
        target: f64,
        q_lo: f64,
        q_hi: f64,
        share_lo: f64,
        share_hi: f64,
    },

    #[error("calibration did not converge after {iterations} iterations (best q {q}, residual {residual:e})")]
    NonConvergence { iterations: u32, q: f64, residual: f64 },

    #[error("unknown preset '{0}' (expected one of preliminary-baseline, slow, baseline, fast)")]
    UnknownPreset(String),

    #[error("invalid scenario configuration: {0}")]
    Config(String),

    #[error("cannot resolve a mass-market anchor volume for {level}: {reason}")]
    Anchor { level: AutomationLevel, reason: String },

    #[error("trajectories and cost curves cover different levels: {0}")]
    LevelMismatch(String),

    #[error("horizon mismatch: {0}")]
    HorizonMismatch(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status for this error: 2 for solver failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Bracket { .. } | Error::NonConvergence { .. } => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

fn format_years(years: &[i32]) -> String {
    years.iter().map(|y| y.to_string()).collect::<Vec<_>>().join(", ")
}
