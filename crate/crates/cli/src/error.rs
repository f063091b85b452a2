use serde_json::{json, Value};
use thiserror::Error;
use warpgeo::GeoError;

/// Failures of a CLI run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Geo(#[from] GeoError),

    #[error("cannot write `{path}`: {reason}")]
    Io { path: String, reason: String },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// 2 for validation failures, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Geo(e) if e.is_validation() => 2,
            CliError::Geo(_) => 3,
            CliError::Io { .. } => 1,
        }
    }

    /// Machine-readable form written to stderr and `error.json`.
    pub fn payload(&self) -> Value {
        let error = match self {
            CliError::Config(msg) => json!({ "kind": "config", "message": msg }),
            CliError::Geo(e) => {
                let mut v =
                    serde_json::to_value(e).unwrap_or_else(|_| json!({ "kind": "unknown" }));
                if let Value::Object(map) = &mut v {
                    map.insert("message".into(), Value::String(e.to_string()));
                }
                v
            }
            CliError::Io { path, reason } => {
                json!({ "kind": "io", "path": path, "message": reason })
            }
        };
        json!({ "exit_code": self.exit_code(), "error": error })
    }
}
