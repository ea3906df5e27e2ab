use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gamesolve::GameSpec;
use gamesolve_cli::{run, RunConfig, EXIT_ERROR};

#[derive(Parser)]
#[command(
    name = "gamesolve",
    version,
    about = "Equilibria, dynamics and diagnostics for strategic games"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a run config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Trace CSV path (overrides the config).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Report JSON path (overrides the config).
        #[arg(long)]
        report: Option<PathBuf>,
        /// RNG seed (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Parse and check a run config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the built-in games.
    ListGames,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Cmd::Run {
            config,
            trace,
            report,
            seed,
        } => RunConfig::load(&config).and_then(|mut cfg| {
            cfg.trace = trace.or(cfg.trace);
            cfg.report = report.or(cfg.report);
            cfg.seed = seed.or(cfg.seed);
            let out = run(&cfg)?;
            println!("{}", out.summary);
            Ok(out.outcome.exit_code())
        }),
        Cmd::Validate { config } => RunConfig::load(&config).and_then(|cfg| {
            cfg.validate()?;
            println!(
                "{}: valid {} config for {}",
                config.display(),
                cfg.command.name(),
                cfg.game.kind()
            );
            Ok(0)
        }),
        Cmd::ListGames => {
            for (kind, about) in GameSpec::catalogue() {
                println!("{kind:<20} {about}");
            }
            Ok(0)
        }
    };
    match code {
        Ok(c) => ExitCode::from(c as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
