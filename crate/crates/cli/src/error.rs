//! CLI errors and their exit codes.

use thiserror::Error;

/// Exit code for ROG, SufficientROG, successful construction and hull members.
pub const EXIT_OK: i32 = 0;
/// Exit code for NotROG and points outside the hull.
pub const EXIT_NEGATIVE: i32 = 10;
/// Exit code for an Unknown verdict.
pub const EXIT_UNKNOWN: i32 = 20;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] rog_core::Error),

    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    /// 2 parse or usage, 3 dimension, 4 input or precondition, 5 numerical
    /// failure, 6 failed invariant or verification.
    pub fn exit_code(&self) -> i32 {
        use rog_core::Error as E;
        match self {
            CliError::Read { .. } | CliError::Write { .. } | CliError::Parse(_) => 2,
            CliError::Dimension(_) => 3,
            CliError::Input(_) => 4,
            CliError::Verify(_) => 6,
            CliError::Core(e) => match e {
                E::DimensionMismatch { .. } => 3,
                E::NonConvergence { .. }
                | E::NotInRange { .. }
                | E::SolveFailed { .. }
                | E::NotFound
                | E::SamplingFailed { .. }
                | E::ReductionFailed(_) => 5,
                E::Internal(_) => 6,
                _ => 4,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Treats a core certificate mismatch as a failed verification.
pub(crate) fn verifying(e: rog_core::Error) -> CliError {
    match e {
        rog_core::Error::CertificateMismatch(m) => CliError::Verify(m),
        e => CliError::Core(e),
    }
}
