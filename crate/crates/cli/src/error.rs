//! Exit codes and the CLI error carrier. One code per error class; no
//! error path exits 0.

use la3d_core::Error as CoreError;

/// Process exit codes, documented in `--help`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    /// Invalid flags, config file, preset, or parameter values.
    Config = 2,
    /// Input frames or mask files unreadable.
    Input = 3,
    /// Output or report files unwritable.
    Output = 4,
    /// The mask provider failed and the policy is abort.
    Detector = 5,
    /// Unexpected internal failure.
    Internal = 70,
}

pub const EXIT_CODE_HELP: &str = "EXIT CODES:\n  \
    0   success\n  \
    2   invalid flags, config file, preset, or parameter values\n  \
    3   input frames or mask files unreadable\n  \
    4   output or report files unwritable\n  \
    5   mask provider failure under the abort policy\n  \
    70  internal error";

#[derive(Debug)]
pub struct CliError {
    pub code: ExitCode,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: ExitCode::Config,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: ExitCode::Input,
            message: message.into(),
        }
    }

    pub fn output(message: impl Into<String>) -> Self {
        Self {
            code: ExitCode::Output,
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            CoreError::UnknownPreset { .. } | CoreError::InvalidParameter(_) => ExitCode::Config,
            CoreError::Detector(_) => ExitCode::Detector,
            CoreError::Io { .. } => ExitCode::Output,
            _ => ExitCode::Internal,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}
