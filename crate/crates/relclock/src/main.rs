use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use relclock::{run, validate::validate, Config, RunOptions};

#[derive(Parser)]
#[command(name = "relclock", version, about = "Relational-time history-state scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write results.json, summary.txt and CSV tables.
    Run {
        #[arg(short, long)]
        config: PathBuf,
        /// Overrides `output_dir` and RELCLOCK_OUTPUT_DIR.
        #[arg(short, long)]
        output_dir: Option<PathBuf>,
        /// Leave the generation time out of the outputs.
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Check a config without running it.
    Validate {
        #[arg(short, long)]
        config: PathBuf,
    },
}

const EXIT_ERROR: u8 = 1;
const EXIT_FAILED_CHECKS: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            output_dir,
            no_timestamp,
        } => {
            let cfg = match Config::load(&config) {
                Ok(c) => c,
                Err(e) => return error(e),
            };
            let opts = RunOptions {
                output_dir,
                timestamp: !no_timestamp,
            };
            match run(&cfg, &opts) {
                Ok(outcome) => {
                    let r = &outcome.report;
                    let failed = r.checks.iter().filter(|c| !c.pass).count();
                    for c in r.checks.iter().filter(|c| !c.pass) {
                        eprintln!("FAIL {}: {:e}", c.name, c.value);
                    }
                    for w in &r.warnings {
                        eprintln!("warning: {w}");
                    }
                    println!(
                        "{}: {}/{} checks passed, results in {}",
                        cfg.scenario,
                        r.checks.len() - failed,
                        r.checks.len(),
                        outcome.output_dir.display()
                    );
                    if outcome.passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_FAILED_CHECKS)
                    }
                }
                Err(e) => error(e),
            }
        }
        Command::Validate { config } => match Config::load(&config) {
            Ok(cfg) => {
                print!("{}", validate(&cfg).render());
                ExitCode::SUCCESS
            }
            Err(e) => error(e),
        },
    }
}

fn error(e: anyhow::Error) -> ExitCode {
    eprintln!("error: {e:#}");
    ExitCode::from(EXIT_ERROR)
}
