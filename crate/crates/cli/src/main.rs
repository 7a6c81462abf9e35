use std::process::ExitCode;

use clap::Parser;
use privex::cli::Cli;

fn main() -> ExitCode {
    match privex::run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(privex::exit_code(&e))
        }
    }
}
