//! Command-line front end for the `dirichlet-roots` library.
//!
//! The binary is a thin wrapper around [`run`]; the pieces are public so the
//! acceptance tests can drive the commands without spawning a process.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod error;

use std::fs;

use args::{Cli, Command};
use commands::Output;
use error::{CliError, CliResult};

/// Runs the parsed command on a pool of `cli.threads` workers.
pub fn run(cli: &Cli) -> CliResult<Output> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()?;
    pool.install(|| match &cli.command {
        Command::Expected(a) => commands::expected(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Compare(a) => commands::compare(a),
        Command::Diagnostics(a) => commands::diagnostics(a),
    })
}

/// Writes the CSV part of `output`, if any.
pub fn write_csv(output: &Output) -> CliResult<()> {
    if let Some((path, body)) = &output.csv {
        fs::write(path, body).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(())
}
