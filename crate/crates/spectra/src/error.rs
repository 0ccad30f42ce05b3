use bergman_core::Error;
use serde::Serialize;

/// Exit status for a failed verification.
pub const EXIT_VERIFY_FAILED: i32 = 1;
/// Exit status for invalid input or configuration.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for a numerical abort.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(Error::NonFiniteIntegrand { .. } | Error::IllConditioned { .. }) => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            EXIT_NUMERICAL => "numerical",
            _ if matches!(self, Self::Io(_)) => "io",
            _ => "config",
        }
    }

    /// One-line JSON record for the diagnostic stream.
    pub fn record(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            error: &'a str,
            message: String,
            exit_code: i32,
        }
        serde_json::to_string(&Record {
            error: self.kind(),
            message: self.to_string(),
            exit_code: self.exit_code(),
        })
        .expect("record serializes")
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Io(std::io::Error::other(e))
    }
}
