//! `barron`: weighted norms, Muckenhoupt checks, embedding ratios, sampled networks and
//! convergence-rate sweeps from the command line.

mod commands;

use std::process::ExitCode;

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::Parser;

use commands::{Cli, EXIT_PARSE, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let on_command = matches!(
                e.get(ContextKind::InvalidArg),
                Some(ContextValue::String(a)) if a == "<COMMAND>"
            );
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                // An unknown subcommand is a usage error, not a malformed value.
                ErrorKind::InvalidValue if on_command => EXIT_USAGE,
                ErrorKind::ValueValidation | ErrorKind::InvalidValue | ErrorKind::InvalidUtf8 => EXIT_PARSE,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
