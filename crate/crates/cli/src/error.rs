use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("solver failure: {0}")]
    Solver(#[from] ritherm::Error),

    #[error("solver failure at grid point {0}")]
    Point(String),

    #[error("invariance check failed: {0}")]
    Check(String),

    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) | CliError::Point(_) | CliError::Io(_) => 3,
            CliError::Check(_) => 4,
        }
    }
}
