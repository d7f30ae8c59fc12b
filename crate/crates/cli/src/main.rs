//! `dbarg`: every computation of `dbarg-core` as a subcommand with a JSON or
//! CSV report. Exit codes: 0 ok, 1 failed check, 2 domain error,
//! 3 convergence failure, 64 malformed arguments.

mod args;
mod commands;
mod config;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command, Format};
use commands::Failure;
use config::RunConfig;
use report::{Outcome, Report, EXIT_USAGE};

fn usage(msg: &str) -> ExitCode {
    eprintln!("dbarg: {msg}");
    ExitCode::from(EXIT_USAGE as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    let mut cfg = match RunConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(msg) => return usage(&msg),
    };
    let format = cli.format.or(cfg.output.format).unwrap_or(match cli.command {
        Command::RingDemo { .. } | Command::Weight { .. } => Format::Csv,
        _ => Format::Json,
    });
    cfg.output.format = Some(format);
    if let Some(p) = &cli.output {
        cfg.output.path = Some(p.clone());
    }

    let started = Instant::now();
    let outcome = match commands::run(&cli.command, &cfg) {
        Ok(o) => o,
        Err(Failure::Usage(msg)) => return usage(&msg),
        Err(Failure::Lib(e)) => Outcome::from_error(&e),
    };
    for e in &outcome.errors {
        eprintln!("dbarg: {}", e["message"].as_str().unwrap_or("error"));
    }
    let report = Report {
        command: commands::name(&cli.command),
        version: env!("CARGO_PKG_VERSION"),
        config: &cfg,
        results: &outcome.results,
        summary: outcome.summary.as_ref(),
        errors: &outcome.errors,
        wall_clock_seconds: cli.timing.then(|| started.elapsed().as_secs_f64()),
    };
    let written = report::render(&report, format).and_then(|bytes| report::emit(&bytes, cfg.output.path.as_deref()));
    if let Err(msg) = written {
        eprintln!("dbarg: {msg}");
        return ExitCode::FAILURE;
    }
    ExitCode::from(outcome.exit_code() as u8)
}
