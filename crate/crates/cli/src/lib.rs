//! Command-line front end: configuration, experiment drivers and output.

pub mod check;
pub mod commands;
pub mod config;
pub mod dataset;

pub use check::{cmd_check, CheckReport, CheckResult};
pub use commands::{cmd_nonlinear, cmd_rates, cmd_resonance, cmd_spectrum, Output};
pub use config::{Command, Format, RunConfig};
pub use dataset::{Dataset, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A configuration value failed validation; `key` is its dotted path.
    #[error("invalid config `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),

    #[error(transparent)]
    Core(#[from] cavitherm::Error),
}

/// Runs a data-producing command.
pub fn run_command(command: Command, cfg: &RunConfig) -> Result<Output, CliError> {
    match command {
        Command::Spectrum => cmd_spectrum(cfg),
        Command::Resonance => cmd_resonance(cfg),
        Command::Nonlinear => cmd_nonlinear(cfg),
        Command::Rates => cmd_rates(cfg),
        Command::Check => unreachable!("check produces a report, not a dataset"),
    }
}

/// Encodes a dataset in the configured format.
pub fn render(ds: &Dataset, format: Format) -> String {
    match format {
        Format::Csv => ds.to_csv(),
        Format::Json => ds.to_json(),
    }
}
