use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid scenario:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("tolerance check failed:\n  {}", .0.join("\n  "))]
    Tolerance(Vec<String>),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Tolerance(_) | CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<prft::PrftError> for CliError {
    fn from(e: prft::PrftError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
