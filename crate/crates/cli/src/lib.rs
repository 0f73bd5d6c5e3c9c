//! Library half of the `twincurve` command: every subcommand is a function
//! returning a serializable value, so the binary, the acceptance target and
//! the unit tests drive the same code.

pub mod advisor;
pub mod config;
pub mod oracles;
pub mod provenance;
pub mod query;
pub mod report;
pub mod sweep;
pub mod verify;

use std::fmt;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Core(twincurve::Error),
    Usage(String),
    Io(std::io::Error),
    /// A sweep or verification found failures; the output was still written.
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use twincurve::Error as E;
        match self {
            CliError::Core(E::Range(_) | E::Exhaustion(_)) => EXIT_BUDGET,
            CliError::Core(E::Inconsistent(_) | E::Numeric(_)) => EXIT_CHECK_FAILED,
            CliError::Core(_) | CliError::Usage(_) => EXIT_VALIDATION,
            CliError::Io(_) => EXIT_VALIDATION,
            CliError::ChecksFailed(_) => EXIT_CHECK_FAILED,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::ChecksFailed(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<twincurve::Error> for CliError {
    fn from(e: twincurve::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}
