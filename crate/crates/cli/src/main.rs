use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use cavitherm_cli::{cmd_check, render, run_command, Command, RunConfig};
use clap::{Parser, Subcommand, ValueEnum};

/// Effective temperatures of cavity modes between a warm environment and
/// cold mirrors.
#[derive(Debug, Parser)]
#[command(name = "cavitherm", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    #[arg(long, global = true, value_enum)]
    units: Option<UnitsArg>,

    /// Worker threads for independent sweep points and cold-started scans.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Repeat for more log output (warn, info, debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    /// Config overrides such as `spectrum.t_mirror=0.4`.
    #[arg(global = true)]
    overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Cmd {
    /// T*(ω) and n(ω) for constant rate ratios.
    Spectrum,
    /// T*(ω) with a Lorentzian mirror resonance.
    Resonance,
    /// Three mixed modes: per-mode temperatures over a coupling scan.
    Nonlinear,
    /// Dissipation rates from cavity and mirror parameters (SI).
    Rates,
    /// Run the invariant and oracle suite.
    Check,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum UnitsArg {
    Natural,
    Si,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let mut overrides = cli.overrides.clone();
    // flags win over file keys and positional overrides
    if let Some(f) = cli.format {
        overrides.push(format!("format=\"{}\"", if matches!(f, FormatArg::Json) { "json" } else { "csv" }));
    }
    if let Some(u) = cli.units {
        overrides.push(format!("units=\"{}\"", if matches!(u, UnitsArg::Si) { "si" } else { "natural" }));
    }
    if let Some(w) = cli.workers {
        overrides.push(format!("workers={w}"));
    }
    if let Some(s) = cli.seed {
        overrides.push(format!("seed={s}"));
    }
    let mut cfg = RunConfig::load(cli.config.as_deref(), &overrides)?;
    if let Some(o) = cli.out {
        cfg.out = Some(o);
    }
    let command = match cli.command {
        Cmd::Spectrum => Command::Spectrum,
        Cmd::Resonance => Command::Resonance,
        Cmd::Nonlinear => Command::Nonlinear,
        Cmd::Rates => Command::Rates,
        Cmd::Check => Command::Check,
    };
    log::debug!("units: {:?}", cfg.units_for(command));

    let (text, ok) = if command == Command::Check {
        let report = cmd_check(&cfg)?;
        (report.render(), report.all_passed())
    } else {
        let out = run_command(command, &cfg)?;
        if let Some(f) = &out.failure {
            log::error!("{f}");
        }
        (render(&out.dataset, cfg.format), out.failure.is_none())
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
