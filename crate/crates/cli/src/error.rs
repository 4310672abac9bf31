use thiserror::Error;

/// Failures of a command, each tied to one process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input, or inconsistent options.
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical or domain failure inside the library.
    #[error("numerical error: {0}")]
    Numerical(bilgamma::Error),

    /// At least one invariant of the verification suite failed.
    #[error("verification failed: {0} check(s) did not pass")]
    VerifyFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    /// Structured payload written to stderr next to the message.
    pub fn payload(&self) -> serde_json::Value {
        let kind = match self {
            CliError::Config(_) => "config",
            CliError::Numerical(e) => error_name(e),
            CliError::VerifyFailed(_) => "verify",
        };
        let mut v = serde_json::json!({ "error": kind, "message": self.to_string() });
        if let CliError::Numerical(bilgamma::Error::KappaUndefined { g_n, h_n }) = self {
            v["g_n"] = serde_json::json!(g_n);
            v["h_n"] = serde_json::json!(h_n);
        }
        v
    }
}

fn error_name(e: &bilgamma::Error) -> &'static str {
    use bilgamma::Error::*;
    match e {
        Domain(_) => "DomainError",
        NonConvergence { .. } => "NonConvergence",
        SingularPoint(_) => "SingularPoint",
        TruncationFailure { .. } => "TruncationFailure",
        InversionNotIntegrable { .. } => "InversionNotIntegrable",
        OutOfStrip { .. } => "OutOfStrip",
        KappaUndefined { .. } => "KappaUndefined",
        ModelMismatch(_) => "ModelMismatch",
        Divergent(_) => "Divergent",
        EmptySample => "EmptySample",
        Grid(_) => "GridError",
        InvalidParameter { .. } => "InvalidParameter",
        InvalidModel(_) => "InvalidModel",
    }
}

impl From<bilgamma::Error> for CliError {
    fn from(e: bilgamma::Error) -> Self {
        match e {
            bilgamma::Error::InvalidParameter { .. } | bilgamma::Error::InvalidModel(_) | bilgamma::Error::Grid(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numerical(other),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(format!("writing CSV: {e}"))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("I/O: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
