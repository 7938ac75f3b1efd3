mod args;
mod commands;
mod output;
mod svg;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::UsageError;

fn run(cli: &Cli) -> anyhow::Result<bool> {
    match &cli.command {
        Command::Map(a) => commands::map(a)?,
        Command::Curve(a) => commands::curve(a)?,
        Command::Cut(a) => commands::cut(a)?,
        Command::Extremum(a) => commands::extremum(a)?,
        Command::PhotonicSim(a) => commands::photonic_sim(a)?,
        Command::Verify(a) => return commands::verify(a),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
