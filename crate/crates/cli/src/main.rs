use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;

use config::{RunConfig, Settings};
use error::CliError;

/// Nematic plate kit.
///
/// Lengths are in units of the reference thickness h0 and energies in units
/// of the shear modulus mu (set mu = 1 for dimensionless output). Plate
/// energies are the rescaled E/h^2 values.
#[derive(Parser)]
#[command(name = "npk", version, about, long_about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    settings: Settings,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Ricci curvature of the target metric and a compatibility verdict
    Compat,
    /// Reduced plate model (alpha, Abar, beta)
    Reduce,
    /// Minimisers of the plate energy over developable curvature
    Minimise,
    /// Build a surface, its energy and a mesh
    Surface,
    /// Energy sweeps along cylinder or zero-stiffness families, or the director profile
    Sweep,
    /// Scaling of the 3D energy of a recovery ansatz as h goes to 0
    GammaCheck,
    /// Everything above with the energy chain check
    Report,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Ok(v) = std::env::var("NPK_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("NPK_THREADS: `{v}` is not a positive integer")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("NPK_THREADS: {e}")))?;
    }
    let settings = match &cli.settings.config {
        Some(path) => {
            let file = Settings::load(path)?;
            cli.settings.over(file)
        }
        None => cli.settings,
    };
    let cfg = RunConfig::from_settings(settings)?;
    log::info!("running with {cfg:?}");
    let out = match cli.command {
        Command::Compat => commands::compat(&cfg),
        Command::Reduce => commands::reduce(&cfg),
        Command::Minimise => commands::minimise(&cfg),
        Command::Surface => commands::surface(&cfg),
        Command::Sweep => commands::sweep(&cfg),
        Command::GammaCheck => commands::gamma_check(&cfg),
        Command::Report => commands::report(&cfg),
    }?;
    out.emit(cfg.out.as_deref(), cfg.format)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("npk: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
