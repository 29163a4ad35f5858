use serde_json::json;

/// Failures with their process exit codes: 2 for configuration, 3 for numerics, 1 for I/O.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {message}")]
    Config { message: String, line: Option<usize>, column: Option<usize> },
    #[error("numerical failure: {0}")]
    Numerical(#[from] homframe::Error),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    /// Machine-readable form written to standard error.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            CliError::Config { message, line, column } => {
                json!({ "error": "config", "message": message, "line": line, "column": column })
            }
            CliError::Numerical(e) => json!({ "error": "numerical", "message": e.to_string() }),
            CliError::Io(e) => json!({ "error": "io", "message": e.to_string() }),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config { message: message.into(), line: None, column: None }
    }
}
