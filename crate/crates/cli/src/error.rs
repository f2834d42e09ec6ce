//! Exit-code taxonomy: 1 output failure, 2 bad input, 3 degenerate
//! alignment.

use nakags_core::Error;

pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn output(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

/// Failures while reading or validating inputs.
pub fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::usage(e.to_string())
}

/// Failures while producing outputs.
pub fn output_err(e: impl std::fmt::Display) -> CliError {
    CliError::output(e.to_string())
}

/// Alignment failures: unsolvable geometry exits 3, everything else is a
/// bad-input error.
pub fn align_err(e: Error) -> CliError {
    match e {
        Error::DegenerateGeometry(_) | Error::TooFewPoints { .. } => CliError {
            code: 3,
            message: e.to_string(),
        },
        other => input_err(other),
    }
}
