use std::process::ExitCode;

use anyon_cli::{execute, Cli, CliError};
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap's own usage errors count as validation errors
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let outcome = execute(&cli.command)?;
    match cli.command.output() {
        Some(path) => std::fs::write(path, &outcome.text)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{}", outcome.text),
    }
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
