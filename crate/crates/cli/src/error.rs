use thiserror::Error;

/// Everything here maps to exit code 2; verification failures are not errors.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown scenario '{0}' (try --list)")]
    UnknownScenario(String),
    #[error("scenario '{scenario}' has no parameter '{key}'")]
    UnknownParam { scenario: String, key: String },
    #[error("parameter '{key}' = {value}: {reason}")]
    BadParam { key: String, value: f64, reason: String },
    #[error("scenario '{0}' is Monte Carlo and needs --seed")]
    SeedRequired(String),
    #[error("config: {0}")]
    Config(String),
    #[error("circuit: {0}")]
    Circuit(String),
    #[error("simulation rejected the parameters: {0}")]
    Simulation(String),
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    pub fn simulation(e: impl std::fmt::Display) -> Self {
        CliError::Simulation(e.to_string())
    }
}
