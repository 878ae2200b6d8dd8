//! Front end for `pencillab`: file analysis reports, seeded property
//! campaigns with replayable failure artifacts, and the shift-truncation
//! experiment.

pub mod analyze;
pub mod campaign;
pub mod shift;

use pencillab::Error;

/// Exit status for input problems (unreadable or malformed files, bad flags).
pub const EXIT_INPUT: u8 = 1;
/// Exit status when a computation contradicts a theorem or two oracles disagree.
pub const EXIT_VIOLATION: u8 = 2;

/// Errors that end a command.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Violation(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Violation(_) => EXIT_VIOLATION,
        }
    }
}

/// Errors that signal a bug rather than bad data or a hard instance.
pub fn is_violation(e: &Error) -> bool {
    matches!(
        e,
        Error::ImplicationViolated { .. }
            | Error::OracleDisagreement { .. }
            | Error::InconsistentSingularityEvidence { .. }
    )
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if is_violation(&e) {
            CliError::Violation(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}
