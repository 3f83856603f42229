use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use super::eval::{evaluate, EvalError};
use super::expr::Expr;
use super::parser::{parse_expression, ParseError};
use crate::par::{self, Parallelism};

const BUILTIN_LEDGER: &str = include_str!("../../data/identities.ledger");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentityStatus {
    /// Stated and proved in the source being checked.
    Stated,
    /// Quoted from the literature and used in a proof.
    Imported,
    Conjectural,
}

impl FromStr for IdentityStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stated" => Ok(IdentityStatus::Stated),
            "imported" => Ok(IdentityStatus::Imported),
            "conjectural" => Ok(IdentityStatus::Conjectural),
            other => Err(format!("unknown status '{other}'")),
        }
    }
}

impl fmt::Display for IdentityStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IdentityStatus::Stated => "stated",
            IdentityStatus::Imported => "imported",
            IdentityStatus::Conjectural => "conjectural",
        })
    }
}

fn as_text<S: Serializer>(e: &Expr, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(e)
}

/// `lhs == rhs`, exactly or modulo `modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityClaim {
    pub id: String,
    #[serde(serialize_with = "as_text")]
    pub lhs: Expr,
    #[serde(serialize_with = "as_text")]
    pub rhs: Expr,
    pub modulus: Option<u64>,
    pub status: IdentityStatus,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error("line {line}: expected 6 '|'-separated fields, got {got}")]
    FieldCount { line: usize, got: usize },
    #[error("line {line}: {field}: {source}")]
    Expression {
        line: usize,
        field: &'static str,
        source: ParseError,
    },
    #[error("line {line}: invalid modulus '{text}'")]
    Modulus { line: usize, text: String },
    #[error("line {line}: {message}")]
    Status { line: usize, message: String },
    #[error("line {line}: duplicate id '{id}'")]
    DuplicateId { line: usize, id: String },
    #[error("reading ledger: {0}")]
    Io(String),
}

/// Parses the line format `id | modulus | lhs | rhs | status | source`.
/// `modulus` is `exact` or an integer `>= 2`; blank lines and lines starting
/// with `#` are skipped.
pub fn parse_ledger(text: &str) -> Result<Vec<IdentityClaim>, LedgerError> {
    let mut claims = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('|').map(str::trim).collect();
        if fields.len() != 6 {
            return Err(LedgerError::FieldCount {
                line,
                got: fields.len(),
            });
        }
        let id = fields[0].to_string();
        let modulus = match fields[1] {
            "exact" => None,
            t => match t.parse::<u64>() {
                Ok(m) if m >= 2 => Some(m),
                _ => {
                    return Err(LedgerError::Modulus {
                        line,
                        text: t.to_string(),
                    })
                }
            },
        };
        let expr = |field: &'static str, t: &str| {
            parse_expression(t).map_err(|source| LedgerError::Expression {
                line,
                field,
                source,
            })
        };
        let lhs = expr("lhs", fields[2])?;
        let rhs = expr("rhs", fields[3])?;
        let status = fields[4]
            .parse()
            .map_err(|message| LedgerError::Status { line, message })?;
        if !seen.insert(id.clone()) {
            return Err(LedgerError::DuplicateId { line, id });
        }
        claims.push(IdentityClaim {
            id,
            lhs,
            rhs,
            modulus,
            status,
            source: fields[5].to_string(),
        });
    }
    Ok(claims)
}

/// The ledger shipped with the crate.
pub fn builtin_ledger() -> Vec<IdentityClaim> {
    parse_ledger(BUILTIN_LEDGER).expect("built-in ledger parses")
}

/// The raw text of the shipped ledger.
pub fn builtin_ledger_text() -> &'static str {
    BUILTIN_LEDGER
}

pub fn load_ledger(path: &Path) -> Result<Vec<IdentityClaim>, LedgerError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LedgerError::Io(format!("{}: {e}", path.display())))?;
    parse_ledger(&text)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("identity {id}: {source}")]
pub struct IdentityError {
    pub id: String,
    pub source: EvalError,
}

/// Smallest exponent where the two sides differ, with both coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub exponent: usize,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub id: String,
    pub status: IdentityStatus,
    pub modulus: Option<u64>,
    pub precision: usize,
    pub passed: bool,
    pub mismatch: Option<Mismatch>,
    pub source: String,
}

/// Evaluates both sides to precision `precision` (under the claim's modulus)
/// and compares them coefficientwise. A pass only says the sides agree
/// through `q^precision`.
pub fn check_identity(
    claim: &IdentityClaim,
    precision: usize,
) -> Result<IdentityReport, IdentityError> {
    let wrap = |source| IdentityError {
        id: claim.id.clone(),
        source,
    };
    let lhs = evaluate(&claim.lhs, precision, claim.modulus).map_err(wrap)?;
    let rhs = evaluate(&claim.rhs, precision, claim.modulus).map_err(wrap)?;
    let first = lhs
        .first_difference(&rhs)
        .map_err(|e| wrap(EvalError::Series(e)))?;
    let mismatch = first.map(|n| Mismatch {
        exponent: n,
        lhs: lhs.coeff(n).to_string(),
        rhs: rhs.coeff(n).to_string(),
    });
    Ok(IdentityReport {
        id: claim.id.clone(),
        status: claim.status,
        modulus: claim.modulus,
        precision,
        passed: mismatch.is_none(),
        mismatch,
        source: claim.source.clone(),
    })
}

/// Checks every claim, exact ones at `exact_precision` and modular ones at
/// `modular_precision`. Reports come back in ledger order.
pub fn check_ledger(
    claims: &[IdentityClaim],
    exact_precision: usize,
    modular_precision: usize,
    par: Parallelism,
) -> Vec<Result<IdentityReport, IdentityError>> {
    par::map(par, claims.iter().collect(), |c| {
        let n = if c.modulus.is_some() {
            modular_precision
        } else {
            exact_precision
        };
        check_identity(c, n)
    })
}
