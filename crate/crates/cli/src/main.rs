//! `bernstein`: command-line front end for `bernstein-core`.

mod artifact;
mod cli;
mod commands;
mod error;
mod grammar;
mod io;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use crate::artifact::svg;
use crate::cli::{Cli, Command};
use crate::error::CliError;

/// Settings shared by every subcommand.
pub struct Ctx {
    pub horizon: u64,
    pub seed: u64,
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let ctx = Ctx { horizon: cli.horizon, seed: cli.seed };
    let mut a = match &cli.command {
        Command::Rates(c) => commands::rates::run(c, &ctx)?,
        Command::Construct(c) => commands::construct::run(c, &ctx)?,
        Command::Classify(c) => commands::construct::classify(c, &ctx)?,
        Command::Split(c) => commands::construct::split(c, &ctx)?,
        Command::Wiener(c) => commands::wiener::run(c, &ctx)?,
        Command::Minimax(c) => commands::minimax::run(c, &ctx)?,
        Command::Graph(c) => commands::graph::run(c, &ctx)?,
        Command::Report(c) => commands::report::run(c, &ctx)?,
    };
    a.horizon = cli.horizon;
    a.seed = cli.seed;
    a.config = json!({
        "params": a.config,
        "format": cli.format,
        "plot": cli.plot.as_ref().map(|p| p.display().to_string()),
    });
    let text = a.render(cli.format)?;
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::flag("out", format!("{}: {e}", path.display())))?,
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Output(e.to_string()))?,
    }
    if let Some(path) = &cli.plot {
        let p = a.plot.as_ref().ok_or_else(|| CliError::flag("plot", format!("{} has no plot", a.command)))?;
        fs::write(path, svg(p)).map_err(|e| CliError::flag("plot", format!("{}: {e}", path.display())))?;
    }
    Ok(if cli.strict && a.inconclusive { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
