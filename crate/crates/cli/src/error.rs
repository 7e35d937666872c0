use thiserror::Error;

/// Errors surfaced by the command-line layer.
///
/// Exit codes: input problems (unreadable files, malformed JSON, schema
/// violations) exit with 2; analysis failures (budget, type, gluing) exit
/// with 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Analysis(#[from] sensheaf::Error),
}

impl CliError {
    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Schema { .. } | Self::Json(_) | Self::Io(_) => 2,
            Self::Analysis(_) => 1,
        }
    }
}
