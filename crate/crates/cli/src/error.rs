use stqm_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical guard: {0}")]
    Guard(Error),

    #[error("{0}")]
    Core(Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical_guard() {
            CliError::Guard(e)
        } else {
            CliError::Core(e)
        }
    }
}

impl CliError {
    /// 2 for configuration problems, 3 for numerical guards, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Core(Error::InvalidArgument(_) | Error::InvalidGrid(_)) => 2,
            CliError::Guard(_) => 3,
            _ => 1,
        }
    }
}
