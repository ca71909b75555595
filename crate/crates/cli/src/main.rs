mod args;
mod commands;

use std::process::ExitCode;

use agla_core::Error as CoreError;
use clap::Parser;

use args::{Cli, Command};

/// A run was refused or a triple failed under `--require-guarantee`.
#[derive(Debug)]
pub struct GateRejected(pub String);

impl std::fmt::Display for GateRejected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for GateRejected {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<GateRejected>().is_some() {
        return 2;
    }
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::NonFiniteIterate { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    // Usage errors exit with 1 so that 2 stays reserved for gate failures.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Compare(a) => commands::compare(a),
        Command::Gate(a) => commands::gate_cmd(a),
        Command::Paramgrid(a) => commands::paramgrid(a),
        Command::Oracle(c) => commands::oracle(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("agla: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
