//! CLI error type carrying the process exit code.

use psmet_core::Error;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: String) -> Self {
        CliError { code: EXIT_USAGE, message }
    }

    pub fn numerical(message: String) -> Self {
        CliError { code: EXIT_NUMERICAL, message }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::InvalidArgument(_) | Error::UnsupportedOperation(_) => EXIT_USAGE,
            _ => EXIT_NUMERICAL,
        };
        CliError { code, message: err.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::usage(format!("i/o error: {err}"))
    }
}
