use std::path::PathBuf;

/// Failures of the command-line layer, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{op}: cannot access {}: {source}", path.display())]
    Io { op: &'static str, path: PathBuf, source: std::io::Error },
    #[error("{op}: cannot parse {}: {message}", path.display())]
    Parse { op: &'static str, path: PathBuf, message: String },
    #[error("{op}: {source}")]
    Core { op: &'static str, source: tsmrc_core::Error },
    #[error("{op}: {message}")]
    Rejected { op: &'static str, message: String },
    #[error("{op}: gains file {} not found", path.display())]
    MissingGains { op: &'static str, path: PathBuf },
    #[error("{op}: {count} closed-loop eigenvalue(s) outside the D-region")]
    RegionViolation { op: &'static str, count: usize },
    #[error("{op}: {message}")]
    Csv { op: &'static str, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core { source: tsmrc_core::Error::Infeasible { .. }, .. } => 2,
            CliError::Core { source: tsmrc_core::Error::InvalidParameter { .. }, op } if *op == "synthesize" => 2,
            CliError::RegionViolation { .. } => 2,
            CliError::MissingGains { .. } => 3,
            _ => 1,
        }
    }

    pub fn core(op: &'static str) -> impl FnOnce(tsmrc_core::Error) -> CliError {
        move |source| CliError::Core { op, source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
