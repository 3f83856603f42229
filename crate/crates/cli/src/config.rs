//! Run settings: command-line flags layered over an optional key=value file.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};

use crate::UsageError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

impl Format {
    fn parse(s: &str) -> Result<Self, UsageError> {
        <Format as ValueEnum>::from_str(s, true)
            .map_err(|_| UsageError(format!("unknown format '{s}'")))
    }
}

/// Flags shared by every subcommand.
#[derive(Args, Clone, Debug, Default)]
pub struct Flags {
    /// Series precision: coefficients of q^0 through q^N.
    #[arg(short = 'N', long = "precision", global = true)]
    pub precision: Option<usize>,
    /// Reduce coefficients modulo this integer.
    #[arg(short = 'm', long = "mod", global = true)]
    pub modulus: Option<u64>,
    /// Index k of PD_k.
    #[arg(short = 'k', global = true)]
    pub k: Option<u64>,
    /// Largest argument A n + r examined.
    #[arg(long, global = true)]
    pub n_max: Option<u64>,
    /// Largest progression step searched by `mine`.
    #[arg(long, global = true)]
    pub a_max: Option<u64>,
    /// Fewest tested arguments for a mined candidate.
    #[arg(long, global = true)]
    pub min_support: Option<u64>,
    /// Worker threads (1 runs sequentially).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Claim registry to use instead of the built-in one.
    #[arg(long, global = true)]
    pub registry: Option<PathBuf>,
    /// Identity ledger to use instead of the built-in one.
    #[arg(long, global = true)]
    pub ledger: Option<PathBuf>,
    /// key=value settings file; command-line flags take precedence.
    #[arg(long, global = true, env = "QPD_CONFIG")]
    pub config: Option<PathBuf>,
    /// Record per-instance wall-clock time in verification reports.
    #[arg(long, global = true)]
    pub timings: bool,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, UsageError> {
    value
        .parse()
        .map_err(|_| UsageError(format!("config: invalid value '{value}' for {key}")))
}

/// Settings read from a config file, as the same set of optional fields.
fn read_config(path: &Path) -> Result<Flags> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut flags = Flags::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| UsageError(format!("config line {}: expected key=value", i + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "precision" | "N" => flags.precision = Some(parse_value(key, value)?),
            "mod" | "modulus" => flags.modulus = Some(parse_value(key, value)?),
            "k" => flags.k = Some(parse_value(key, value)?),
            "n_max" => flags.n_max = Some(parse_value(key, value)?),
            "a_max" => flags.a_max = Some(parse_value(key, value)?),
            "min_support" => flags.min_support = Some(parse_value(key, value)?),
            "jobs" => flags.jobs = Some(parse_value(key, value)?),
            "format" => flags.format = Some(Format::parse(value)?),
            "out" => flags.out = Some(PathBuf::from(value)),
            "registry" => flags.registry = Some(PathBuf::from(value)),
            "ledger" => flags.ledger = Some(PathBuf::from(value)),
            "timings" => flags.timings = parse_value(key, value)?,
            _ => {
                return Err(
                    UsageError(format!("config line {}: unknown key '{key}'", i + 1)).into(),
                )
            }
        }
    }
    Ok(flags)
}

/// Fills every flag not given on the command line from the config file.
pub fn resolve(flags: Flags) -> Result<Flags> {
    let Some(path) = flags.config.clone() else {
        return Ok(flags);
    };
    let file = read_config(&path)?;
    Ok(Flags {
        precision: flags.precision.or(file.precision),
        modulus: flags.modulus.or(file.modulus),
        k: flags.k.or(file.k),
        n_max: flags.n_max.or(file.n_max),
        a_max: flags.a_max.or(file.a_max),
        min_support: flags.min_support.or(file.min_support),
        jobs: flags.jobs.or(file.jobs),
        format: flags.format.or(file.format),
        out: flags.out.or(file.out),
        registry: flags.registry.or(file.registry),
        ledger: flags.ledger.or(file.ledger),
        config: Some(path),
        timings: flags.timings || file.timings,
    })
}
