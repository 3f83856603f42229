//! `qpd`: compute designated-summand series, verify claims, mine congruences.
//!
//! Exit status: 0 on success, 1 when a proven claim or stated identity fails
//! (or on runtime errors), 2 for usage and input errors, 3 when a conjecture
//! is refuted.

mod config;
mod output;

use std::fmt;
use std::fs;
use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use qpd_core::counters::{odd_multiplicity_count, oracle_pd, oracle_pdk};
use qpd_core::identities::{
    builtin_ledger, check_ledger, evaluate, load_ledger, parse_expression, IdentityClaim,
    IdentityStatus, LedgerError, ParseError,
};
use qpd_core::par::with_jobs;
use qpd_core::verify::intexpr::IntExprError;
use qpd_core::verify::{
    builtin_registry, check_conjectures, load_registry, mine_congruences, select_claims,
    verify_claim, verify_claims, Claim, ClaimStatus, MineOptions, RegistryError, Verdict,
    VerificationReport, VerifyError, VerifyOptions,
};
use qpd_core::Parallelism;

use config::{Flags, Format};

/// Bad command-line input; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser)]
#[command(
    name = "qpd",
    version,
    about = "Partitions with designated summands: series, verification and congruence mining"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Print coefficients 0..=N of a series expression as "n,c" lines.
    Series { expression: String },
    /// Verify registry claims by id, or `all`.
    Verify {
        #[arg(required = true)]
        ids: Vec<String>,
        /// Restrict a single claim to one parameter assignment, e.g. `l=3`.
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Search progressions A n + r where PD_k vanishes modulo m.
    Mine {
        /// Drop progressions contained in a smaller mined progression.
        #[arg(long)]
        primitive: bool,
    },
    /// Count by direct partition enumeration.
    Oracle {
        #[arg(value_enum)]
        kind: OracleKind,
        /// `n`, or `k n` for pdk.
        #[arg(required = true)]
        args: Vec<u64>,
    },
    /// Check the identity ledger, or only the given ids.
    Identities { ids: Vec<String> },
    /// Check every conjectural registry claim.
    Conjectures,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Pd,
    Pdk,
    Oddmult,
}

/// Default argument bound for `verify`.
const VERIFY_N_MAX: u64 = 1000;
/// Default argument bound for `conjectures`.
const CONJECTURE_N_MAX: u64 = 3000;
/// Default precisions for `identities` when `-N` is absent.
const IDENTITY_EXACT_N: usize = 300;
const IDENTITY_MODULAR_N: usize = 1000;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn exit_status(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>()
            || cause.is::<ParseError>()
            || cause.is::<IntExprError>()
            || cause.is::<RegistryError>()
            || cause.is::<LedgerError>()
        {
            return 2;
        }
        if let Some(
            VerifyError::UnknownClaim(_) | VerifyError::Parameter(_) | VerifyError::Registry(_),
        ) = cause.downcast_ref::<VerifyError>()
        {
            return 2;
        }
    }
    1
}

struct Run {
    flags: Flags,
    parallelism: Parallelism,
}

impl Run {
    fn format(&self, default: Format) -> Format {
        self.flags.format.unwrap_or(default)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.flags.out {
            Some(path) => {
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
                Ok(())
            }
        }
    }

    fn registry(&self) -> Result<Vec<Claim>> {
        Ok(match &self.flags.registry {
            Some(path) => load_registry(path)?,
            None => builtin_registry(),
        })
    }

    fn ledger(&self) -> Result<Vec<IdentityClaim>> {
        Ok(match &self.flags.ledger {
            Some(path) => load_ledger(path)?,
            None => builtin_ledger(),
        })
    }

    fn verify_options(&self, default_n_max: u64) -> VerifyOptions {
        VerifyOptions {
            argument_max: self.flags.n_max.unwrap_or(default_n_max),
            parallelism: self.parallelism,
            timings: self.flags.timings,
        }
    }

    fn series(&self, expression: &str) -> Result<u8> {
        let n = self
            .flags
            .precision
            .ok_or_else(|| usage("series needs a precision (-N)"))?;
        let expr = parse_expression(expression)?;
        let s = evaluate(&expr, n, self.flags.modulus)?;
        self.emit(&output::series(
            &s,
            &expr.to_string(),
            self.format(Format::Plain),
        )?)?;
        Ok(0)
    }

    fn verify(&self, ids: &[String], params: &[String]) -> Result<u8> {
        let registry = self.registry()?;
        let selected = select_claims(&registry, ids)?;
        let opts = self.verify_options(VERIFY_N_MAX);
        let reports = if params.is_empty() {
            let claims: Vec<Claim> = selected.into_iter().cloned().collect();
            verify_claims(&claims, opts)?
        } else {
            let [claim] = selected.as_slice() else {
                return Err(usage("--param needs exactly one claim id"));
            };
            let assignment = params
                .iter()
                .map(|p| parse_assignment(p))
                .collect::<Result<Vec<_>>>()?;
            verify_claim(claim, Some(&assignment), opts)?
        };
        self.emit(&output::reports(&reports, self.format(Format::Json))?)?;
        Ok(report_status(&reports))
    }

    fn mine(&self, primitive: bool) -> Result<u8> {
        let a_max = self
            .flags
            .a_max
            .ok_or_else(|| usage("mine needs --a-max"))?;
        if a_max < 2 {
            return Err(usage(format!("--a-max must be at least 2, got {a_max}")));
        }
        let k = self.flags.k.ok_or_else(|| usage("mine needs -k"))?;
        let m = self
            .flags
            .modulus
            .ok_or_else(|| usage("mine needs a modulus (-m)"))?;
        let min_support = self.flags.min_support.unwrap_or(20);
        // Smallest bound at which every step up to a_max can reach min_support.
        let n_max = self.flags.n_max.unwrap_or(a_max * (min_support + 1) - 1);
        let opts = MineOptions {
            min_support,
            primitive_only: primitive,
            parallelism: self.parallelism,
            ..MineOptions::new(k, m, a_max, n_max)
        };
        let cands = mine_congruences(&opts, &self.registry()?)?;
        self.emit(&output::candidates(&cands, self.format(Format::Csv))?)?;
        Ok(0)
    }

    fn oracle(&self, kind: OracleKind, args: &[u64]) -> Result<u8> {
        let value = match (kind, args) {
            (OracleKind::Pd, [n]) => oracle_pd(*n),
            (OracleKind::Oddmult, [n]) => odd_multiplicity_count(*n),
            (OracleKind::Pdk, [k, n]) => oracle_pdk(*k, *n).map_err(|e| usage(e.to_string()))?,
            (OracleKind::Pdk, _) => return Err(usage("oracle pdk takes k and n")),
            _ => return Err(usage("oracle takes a single n")),
        };
        self.emit(&format!("{value}\n"))?;
        Ok(0)
    }

    fn identities(&self, ids: &[String]) -> Result<u8> {
        let mut ledger = self.ledger()?;
        if !ids.is_empty() {
            for id in ids {
                if !ledger.iter().any(|c| &c.id == id) {
                    return Err(usage(format!("unknown identity '{id}'")));
                }
            }
            ledger.retain(|c| ids.contains(&c.id));
        }
        let (exact, modular) = match self.flags.precision {
            Some(n) => (n, n),
            None => (IDENTITY_EXACT_N, IDENTITY_MODULAR_N),
        };
        let reports = check_ledger(&ledger, exact, modular, self.parallelism)
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        self.emit(&output::identities(&reports, self.format(Format::Plain))?)?;
        let failed = |conjectural: bool| {
            reports
                .iter()
                .any(|r| !r.passed && (r.status == IdentityStatus::Conjectural) == conjectural)
        };
        Ok(if failed(false) {
            1
        } else if failed(true) {
            3
        } else {
            0
        })
    }

    fn conjectures(&self) -> Result<u8> {
        let reports = check_conjectures(&self.registry()?, self.verify_options(CONJECTURE_N_MAX))?;
        self.emit(&output::reports(&reports, self.format(Format::Json))?)?;
        Ok(report_status(&reports))
    }
}

/// Reports every failure on stderr; 1 if a proven claim failed, 3 if only
/// conjectures were refuted.
fn report_status(reports: &[VerificationReport]) -> u8 {
    let mut status = 0;
    for r in reports.iter().filter(|r| !r.passed()) {
        let what = if r.verdict == Verdict::Counterexample {
            "refuted"
        } else {
            "failed"
        };
        let witness = r
            .first_failure()
            .map(|f| {
                format!(
                    " at n = {} (argument {}): expected {}, got {}",
                    f.n, f.argument, f.expected, f.actual
                )
            })
            .unwrap_or_default();
        eprintln!("{} {:?} {what}{witness}", r.claim_id, r.params);
        status = match r.status {
            ClaimStatus::Proven => 1,
            ClaimStatus::Conjectural if status == 0 => 3,
            ClaimStatus::Conjectural => status,
        };
    }
    status
}

fn parse_assignment(text: &str) -> Result<(String, i64)> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| usage(format!("--param expects NAME=VALUE, got '{text}'")))?;
    let value = value
        .trim()
        .parse()
        .map_err(|_| usage(format!("--param {name}: '{value}' is not an integer")))?;
    Ok((name.trim().to_string(), value))
}

fn run(cli: Cli) -> Result<u8> {
    let flags = config::resolve(cli.flags)?;
    let parallelism = match flags.jobs {
        Some(1) => Parallelism::Sequential,
        _ => Parallelism::Parallel,
    };
    let jobs = flags.jobs;
    let run = Run { flags, parallelism };
    with_jobs(jobs, || match &cli.command {
        Command::Series { expression } => run.series(expression),
        Command::Verify { ids, params } => run.verify(ids, params),
        Command::Mine { primitive } => run.mine(*primitive),
        Command::Oracle { kind, args } => run.oracle(*kind, args),
        Command::Identities { ids } => run.identities(ids),
        Command::Conjectures => run.conjectures(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_status(&err))
        }
    }
}
