mod args;
mod commands;
mod error;
mod output;
mod verify;

use std::process::ExitCode;

use clap::Parser;
use psi3_core::exec::Execution;

use crate::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mode = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::best()
    };
    let outcome = commands::run(&cli.command, cli.mod2exp, mode).and_then(|report| {
        let text = output::render(&report, cli.format, cli.mod2exp)?;
        output::write_to(cli.out.as_deref(), &text)?;
        Ok(report.passed)
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("psi3: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
