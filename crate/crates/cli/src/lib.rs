//! Command-line front end for `crouzeix-core`: Crouzeix ratios of input
//! matrices, family sweeps, the half-nome identity table, numerical range
//! samples, and the verification suite.

pub mod commands;
pub mod input;
pub mod output;
pub mod verify;

use crouzeix_core::Error as CoreError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_GEOMETRY: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{failed} of {total} verification checks failed")]
    Verification { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(
                CoreError::NotAnEllipse { .. }
                | CoreError::NotSupported(_)
                | CoreError::DegenerateGeometry(_),
            ) => EXIT_GEOMETRY,
            CliError::Verification { .. } => EXIT_VERIFY,
            _ => EXIT_INPUT,
        }
    }

    /// Extra context printed under the error message.
    pub fn hint(&self) -> Option<&'static str> {
        match self {
            CliError::Core(CoreError::NotAnEllipse { .. }) => Some(
                "the numerical range must be a disk or an ellipse for the conformal map to be explicit",
            ),
            _ => None,
        }
    }
}
