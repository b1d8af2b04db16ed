mod args;
mod error;
mod figure1;
mod output;
mod selftest;
mod simulate;
mod species;
mod table1;
mod thermo_cmd;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Figure1(a) => figure1::run(&a),
        Command::Table1(a) => table1::run(&a),
        Command::Thermo(a) => thermo_cmd::run(&a),
        Command::Simulate(a) => simulate::run(&a),
        Command::Selftest => selftest::run(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // --help and --version come through here too
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("covstat: {e}");
            e.exit_code()
        }
    }
}
