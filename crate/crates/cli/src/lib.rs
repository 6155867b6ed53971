//! Command-line frontend for `greatroot`: Tracy–Widom values, critical
//! values, batch tests on CSV data and reproducible simulations.
//!
//! Exit codes: 0 success, 1 usage/domain, 2 data/ingestion, 3 numerical.
//! Failures print one line `error[<code>]: <message>` to stderr.

// `!(x > 0.0)` style guards deliberately treat NaN as out of range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
mod cache;
pub mod commands;
pub mod error;
mod grid;
mod ingest;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use cache::{cache_dir, CACHE_ENV};
pub use error::{CliError, CliResult, EXIT_DATA, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
pub use grid::parse_grid;

use args::{Cli, Command};
use commands::Context;

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    // ignore "already initialized" when run repeatedly in one process
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .format_timestamp(None)
        .try_init();
}

/// Parses `argv` (including the program name) and runs the command,
/// writing primary output to `out`.
pub fn run<I, T>(argv: I, out: &mut dyn Write) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand) {
                write!(out, "{e}").map_err(|io| CliError::io("<stdout>", io))?;
                return Ok(());
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            return Err(CliError::Usage(first.trim_start_matches("error: ").to_string()));
        }
    };
    init_logging(cli.verbose);
    let ctx = Context { cache_dir: cache_dir(cli.cache_dir.as_deref()), workers: cli.workers };
    match cli.command {
        Command::Tw { cmd } => commands::tw(&ctx, cmd, out),
        Command::Critval(a) => commands::critval(&ctx, a, out),
        Command::Test { cmd } => commands::test(&ctx, cmd, out),
        Command::Simulate { cmd } => commands::simulate(&ctx, cmd, out),
    }
}

/// [`run`] against stdout; prints errors and returns the exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(argv, &mut lock) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("{}", e.render());
            e.exit_code()
        }
    }
}
