use qridge_core::Error as CoreError;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}:{line}{}: {message}", column.as_ref().map(|c| format!(" column `{c}`")).unwrap_or_default())]
    Parse {
        path: String,
        line: usize,
        column: Option<String>,
        message: String,
    },

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    /// 1 for numerical pipeline failures, 2 for usage, configuration and
    /// input problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                CoreError::Dimension { .. }
                | CoreError::NonFinite(_)
                | CoreError::EmptyGrid
                | CoreError::InvalidConfig(_)
                | CoreError::Layout(_)
                | CoreError::UnknownRegister(_) => 2,
                _ => 1,
            },
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Parse { .. } => "parse",
            CliError::Io { .. } => "io",
            CliError::Core(_) if self.exit_code() == 2 => "config",
            CliError::Core(_) => "numerical",
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
                "exit_code": self.exit_code(),
            }
        })
    }
}
