//! Error shape shared by every command: configuration problems exit with
//! code 2, numerical failures with code 3, and either way a single JSON
//! object lands on stderr.

#[derive(Debug)]
pub enum CliError {
    Config { code: String, message: String },
    Numerical { code: String, message: String },
}

impl CliError {
    pub fn config(code: &str, message: String) -> Self {
        CliError::Config {
            code: code.to_string(),
            message,
        }
    }

    /// Core errors raised while validating/constructing a model are
    /// configuration errors.
    pub fn config_from_core(e: aaqc::Error) -> Self {
        CliError::Config {
            code: e.code().to_string(),
            message: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical { .. } => 3,
        }
    }

    pub fn to_stderr_json(&self) -> String {
        let (kind, code, message) = match self {
            CliError::Config { code, message } => ("config", code, message),
            CliError::Numerical { code, message } => ("numerical", code, message),
        };
        serde_json::json!({ "error": { "kind": kind, "code": code, "message": message } })
            .to_string()
    }
}

/// Core errors raised mid-computation are numerical failures.
impl From<aaqc::Error> for CliError {
    fn from(e: aaqc::Error) -> Self {
        CliError::Numerical {
            code: e.code().to_string(),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numerical {
            code: "Io".to_string(),
            message: e.to_string(),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Numerical {
            code: "Internal".to_string(),
            message: format!("{e:#}"),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config { code, message } => write!(f, "config error [{code}]: {message}"),
            CliError::Numerical { code, message } => {
                write!(f, "numerical error [{code}]: {message}")
            }
        }
    }
}
