//! Command-line front end for `lambda_fcs`: presets, parameter sweeps and
//! figure datasets written as CSV or JSON.

pub mod commands;
pub mod config;
pub mod table;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::{parse_format, Command, Format, RawConfig, RunConfig};

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable giving the default worker count.
pub const JOBS_ENV: &str = "LAMBDA_FCS_JOBS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Io(_) => EXIT_IO,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lambda-fcs", version, about = "Photon statistics and slow light in a driven Λ system")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Atomic preset: na, cs or custom.
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,
    /// Override a setting, e.g. `system.delta_p=0.8` or `sweep.xi=1:100:200:log`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output file (default: stdout).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, global = true, value_name = "FORMAT")]
    format: Option<String>,
    /// Worker threads (default: $LAMBDA_FCS_JOBS, else 1).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Steady-state density matrix against probe detuning.
    Spectrum,
    /// Fano factor against group velocity on both ξ branches.
    Tradeoff,
    /// Fano factor over probe detuning and probe Rabi frequency.
    FanoMap,
    /// Current, noise and Fano factor at one point.
    Fcs,
    /// n-resolved integration checked against the secular formulas.
    Oracle,
    /// Dressed states of the effective Hamiltonian.
    Dressed,
    /// The pinned Na and Cs constants.
    Presets,
}

impl From<&Sub> for Command {
    fn from(s: &Sub) -> Self {
        match s {
            Sub::Spectrum => Command::Spectrum,
            Sub::Tradeoff => Command::Tradeoff,
            Sub::FanoMap => Command::FanoMap,
            Sub::Fcs => Command::Fcs,
            Sub::Oracle => Command::Oracle,
            Sub::Dressed => Command::Dressed,
            Sub::Presets => Command::Presets,
        }
    }
}

fn build_config(cli: &Cli, env_jobs: Option<String>) -> Result<RunConfig, CliError> {
    let mut raw = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            RawConfig::from_toml(&text)?
        }
        None => RawConfig::default(),
    };
    if let Some(p) = &cli.preset {
        raw.set_preset(p);
    }
    let mut sweep_from_flags = false;
    for s in &cli.set {
        raw.apply_set(s, &mut sweep_from_flags)?;
    }
    if let Some(f) = &cli.format {
        raw.set_format(parse_format(f)?);
    }
    if let Some(path) = &cli.out {
        raw.set_path(path.clone());
    }
    match (cli.jobs, env_jobs) {
        (Some(n), _) => raw.set_jobs(n),
        (None, Some(v)) if !raw.has_jobs() => {
            let n = v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{JOBS_ENV}='{v}' is not a positive integer")))?;
            raw.set_jobs(n);
        }
        _ => {}
    }
    RunConfig::resolve(raw, (&cli.command).into())
}

/// Writes the table in the configured format.
pub fn write_output(cfg: &RunConfig, table: &table::Table, out: &mut impl Write) -> Result<(), CliError> {
    match cfg.format {
        Format::Csv => table.write_csv(out)?,
        Format::Json => {
            let config = serde_json::to_value(cfg).map_err(|e| CliError::Config(e.to_string()))?;
            serde_json::to_writer_pretty(&mut *out, &table.to_json(config)).map_err(io::Error::from)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Parses arguments, runs the command, writes the output and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = build_config(&cli, std::env::var(JOBS_ENV).ok()).and_then(|cfg| {
        let table = commands::run_command(&cfg)?;
        match &cfg.path {
            Some(path) => write_output(&cfg, &table, &mut BufWriter::new(File::create(path)?))?,
            None => write_output(&cfg, &table, &mut io::stdout().lock())?,
        }
        Ok(table.failures)
    });
    match result {
        Ok(0) => EXIT_OK,
        Ok(n) => {
            eprintln!("lambda-fcs: {n} row(s) failed; see the status column");
            EXIT_NUMERICAL
        }
        Err(e) => {
            eprintln!("lambda-fcs: {e}");
            e.exit_code()
        }
    }
}
