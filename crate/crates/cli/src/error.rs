use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("model error: {0}")]
    Model(#[from] lsq_core::Error),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed table: {0}")]
    Table(String),
    #[error("invariant violated: {0}")]
    Violation(String),
}

impl CliError {
    /// 2 for anything wrong with the input, 3 for a failed mathematical check.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Violation(_) => 3,
            CliError::Model(lsq_core::Error::BoundViolated { .. } | lsq_core::Error::EigenResidualExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Table(e.to_string())
    }
}
