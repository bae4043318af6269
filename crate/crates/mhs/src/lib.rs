//! Command-line front end for `mhs-core`: report envelopes, mesh files and
//! exit-code policy (0 success, 1 validation or usage error, 2 numerical
//! failure).

// `!(x > 0.0)` style guards are meant to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod error;
pub mod meshio;

use std::ffi::OsString;
use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde::Serialize;

use crate::cli::{Cli, Format, RunConfig};
use crate::commands::Outcome;
use crate::error::{CliError, CliResult};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "MHS_THREADS";

#[derive(Serialize)]
struct Envelope<'a> {
    version: &'static str,
    timestamp_unix: u64,
    config: &'a RunConfig,
    #[serde(flatten)]
    result: &'a serde_json::Map<String, serde_json::Value>,
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Validation(format!("{THREADS_ENV}={raw} is not a positive integer"))
    })?;
    // A pool may already exist when `run` is called repeatedly in one process.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn render(cli: &Cli, cfg: &RunConfig, out: Outcome) -> CliResult<Vec<u8>> {
    match cli.format {
        Format::Json => {
            let serde_json::Value::Object(map) = out.result else {
                return Err(CliError::Numerical("report result is not an object".into()));
            };
            let timestamp_unix = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            let env = Envelope {
                version: mhs_core::VERSION,
                timestamp_unix,
                config: cfg,
                result: &map,
            };
            let mut bytes = serde_json::to_vec_pretty(&env)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Csv => {
            let table = out.table.ok_or_else(|| {
                CliError::Validation(format!(
                    "{} has no CSV form; use --format json",
                    cfg.subcommand
                ))
            })?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.headers)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            w.into_inner()
                .map_err(|e| CliError::Validation(e.to_string()))
        }
    }
}

fn run_cli(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    let (cfg, out) = commands::execute(cli)?;
    let bytes = render(cli, &cfg, out)?;
    match &cli.output {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs one subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(spec) = cli.command.family_mut() {
        spec.resolve();
    }
    match run_cli(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("mhs: {e}");
            e.exit_code()
        }
    }
}
