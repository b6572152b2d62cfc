use std::path::Path;

use drcs_core::ambiguity::AfError;
use drcs_core::bounds::BoundError;
use drcs_core::drcs::DrcsError;
use drcs_core::hadamard::HadamardError;
use drcs_core::rectangle::RectangleError;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Validation(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Validation(_) => "validation",
            CliError::Infeasible(_) => "infeasible",
            CliError::Io { .. } => "io",
        }
    }

    /// Single-line JSON for stderr.
    pub fn to_json(&self) -> String {
        json!({
            "error": {
                "kind": self.kind(),
                "code": self.exit_code(),
                "message": self.to_string(),
            }
        })
        .to_string()
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}

impl From<RectangleError> for CliError {
    fn from(e: RectangleError) -> Self {
        match e {
            RectangleError::ParamsOutOfRange(_)
            | RectangleError::CapExceeded { .. }
            | RectangleError::TooManyColumnsRemoved { .. }
            | RectangleError::PreconditionViolated(_)
            | RectangleError::Field(_) => CliError::Infeasible(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<HadamardError> for CliError {
    fn from(e: HadamardError) -> Self {
        match e {
            HadamardError::Io { ref path, ref source } => CliError::Io {
                path: path.clone(),
                message: source.to_string(),
            },
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<DrcsError> for CliError {
    fn from(e: DrcsError) -> Self {
        match e {
            DrcsError::Io { ref path, ref source } => CliError::Io {
                path: path.clone(),
                message: source.to_string(),
            },
            DrcsError::InvalidZone { .. } | DrcsError::ZoneTooWide { .. } => CliError::Infeasible(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<AfError> for CliError {
    fn from(e: AfError) -> Self {
        match e {
            AfError::InvalidZone { .. } => CliError::Infeasible(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<BoundError> for CliError {
    fn from(e: BoundError) -> Self {
        CliError::Infeasible(e.to_string())
    }
}
