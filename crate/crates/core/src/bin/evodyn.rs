use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use evodyn::experiment::{self, describe, verify};
use evodyn::Error;

#[derive(Parser)]
#[command(name = "evodyn", version, about = "Exact EA dynamics, gradient flows and spectral tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment configuration; prints the run directory.
    Run { config: PathBuf },
    /// Print the schema and an example configuration for a kind.
    Describe { kind: String },
    /// Run the built-in oracle checks.
    Verify {
        /// Perturb the named check so that it fails.
        #[arg(long)]
        inject_fault: Option<String>,
    },
}

fn fail(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run { config } => match experiment::run_file(&config) {
            Ok(outcome) => {
                println!("{}", outcome.dir.display());
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Describe { kind } => match describe(&kind) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Verify { inject_fault } => match verify(inject_fault.as_deref()) {
            Ok(report) => {
                print!("{report}");
                if report.all_passed() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => fail(e),
        },
    }
}
