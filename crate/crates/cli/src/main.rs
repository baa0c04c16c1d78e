mod args;
mod bound;
mod extremal;
mod measure;
mod output;
mod sweep;
mod verify;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use output::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::invalid(e.to_string()))?;
    }
    match &cli.command {
        Command::Bound(a) => bound::run(a),
        Command::Extremal(a) => extremal::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Sweep(a) => sweep::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::invalid(e.render().to_string().trim().to_string());
            eprintln!("{}", err.body);
            return ExitCode::from(err.code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.body);
            ExitCode::from(e.code)
        }
    }
}
