use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use prft_cli::{execute, library, resolve, validate, CliError, RunOptions};

#[derive(Parser)]
#[command(name = "prft", version, about = "Photon-resolved Floquet counting statistics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or bundled scenario and write its tables
    Run {
        scenario: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, env = "PRFT_THREADS")]
        threads: Option<usize>,
        /// overrides the scenario seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a scenario without running it
    Validate { scenario: String },
    /// List bundled scenarios
    ListScenarios,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { scenario, out, threads, seed } => {
            if let Some(n) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| CliError::Io(e.to_string()))?;
            }
            let s = resolve(&scenario)?;
            let exec = execute(&s, &out, &RunOptions { seed })?;
            for (label, dir, _) in &exec.runs {
                println!("{}: {}", label.as_deref().unwrap_or(&s.name), dir.display());
            }
            Ok(())
        }
        Command::Validate { scenario } => {
            let s = resolve(&scenario)?;
            let issues = validate::validate(&s);
            if issues.is_empty() {
                println!("ok");
                Ok(())
            } else {
                Err(CliError::Validation(issues))
            }
        }
        Command::ListScenarios => {
            for n in library::names() {
                println!("{n}");
            }
            Ok(())
        }
    }
}
