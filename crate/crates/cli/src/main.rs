use std::process::ExitCode;

use clap::Parser;
use nmqubit_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("nmqubit: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
