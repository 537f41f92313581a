use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = rampsvm::cli::Cli::parse();
    match rampsvm::cli::run(&cli) {
        Ok(outcome) => {
            if let Some(text) = outcome.stdout {
                // A closed pipe (e.g. `| head`) is not an error worth reporting.
                let _ = writeln!(std::io::stdout().lock(), "{text}");
            }
            ExitCode::from(outcome.exit_code)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(rampsvm::cli::exit_code_for(&err))
        }
    }
}
