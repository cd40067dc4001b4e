//! Exit-code discipline: 2 for configuration problems (bad flags, files,
//! schemas, parameters), 3 for numeric failures (divergence, missing roots,
//! boundary contact). The failure location travels with the error so the
//! diagnostic line can say which stage broke.

use delaylab::Error;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub location: String,
    pub message: String,
}

pub type CliResult<T> = Result<T, Failure>;

impl Failure {
    pub fn config(location: &str, message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            location: location.to_string(),
            message: message.into(),
        }
    }

    pub fn numeric(location: &str, message: impl Into<String>) -> Failure {
        Failure {
            code: 3,
            location: location.to_string(),
            message: message.into(),
        }
    }

    /// Classifies a core error: malformed requests exit 2, failed
    /// computations exit 3.
    pub fn from_core(location: &str, e: Error) -> Failure {
        let code = match &e {
            Error::InvalidInput(_)
            | Error::UnknownModel(_)
            | Error::MissingParameter { .. }
            | Error::UnsupportedDimension { .. }
            | Error::OutOfDomain { .. }
            | Error::StepExceedsDelay { .. } => 2,
            _ => 3,
        };
        Failure {
            code,
            location: location.to_string(),
            message: e.to_string(),
        }
    }
}

/// Attaches a location to a core result.
pub trait Located<T> {
    fn at(self, location: &str) -> CliResult<T>;
}

impl<T> Located<T> for delaylab::Result<T> {
    fn at(self, location: &str) -> CliResult<T> {
        self.map_err(|e| Failure::from_core(location, e))
    }
}
