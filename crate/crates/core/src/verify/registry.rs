use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use super::env::Bindings;
use super::intexpr::{
    expand_params, parse_int_expr, parse_param, IntExpr, IntExprError, ParamSpec,
};

const BUILTIN_REGISTRY: &str = include_str!("../../data/claims.registry");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimStatus {
    Proven,
    Conjectural,
}

impl FromStr for ClaimStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "proven" => Ok(ClaimStatus::Proven),
            "conjectural" => Ok(ClaimStatus::Conjectural),
            other => Err(format!("unknown status '{other}'")),
        }
    }
}

impl fmt::Display for ClaimStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClaimStatus::Proven => "proven",
            ClaimStatus::Conjectural => "conjectural",
        })
    }
}

/// What the coefficient `PD_k(A n + r) mod m` is compared against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Predicate {
    Zero,
    /// A counter expression evaluated at the index `n`.
    Match(IntExpr),
    /// A closed-form expression evaluated at the index `n`.
    Closed(IntExpr),
}

impl Predicate {
    pub fn is_zero(&self) -> bool {
        matches!(self, Predicate::Zero)
    }

    pub fn expr(&self) -> Option<&IntExpr> {
        match self {
            Predicate::Zero => None,
            Predicate::Match(e) | Predicate::Closed(e) => Some(e),
        }
    }
}

/// One registry entry: `PD_k(A n + r) ≡ predicate (mod m)` for every index `n`
/// passing the index filter, for every parameter assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Claim {
    pub id: String,
    /// `None` for unrestricted `PD`.
    pub family: Option<IntExpr>,
    pub step: IntExpr,
    pub residue: IntExpr,
    pub modulus: IntExpr,
    pub predicate: Predicate,
    pub predicate_text: String,
    pub params: Vec<ParamSpec>,
    pub index: Option<IntExpr>,
    pub index_text: Option<String>,
    pub status: ClaimStatus,
    pub source: String,
}

/// A claim with every parameter fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimInstance {
    pub claim_id: String,
    pub status: ClaimStatus,
    pub params: Vec<(String, i64)>,
    pub k: Option<u64>,
    pub step: u64,
    pub residue: u64,
    pub modulus: u64,
    pub predicate: Predicate,
    pub predicate_text: String,
    pub index: Option<IntExpr>,
    pub index_text: Option<String>,
}

impl ClaimInstance {
    pub fn family_name(&self) -> String {
        match self.k {
            Some(k) => format!("PD_{k}"),
            None => "PD".to_string(),
        }
    }

    /// Whether the index `n` passes the claim's side conditions.
    pub fn index_selected(&self, n: u64) -> Result<bool, IntExprError> {
        match &self.index {
            None => Ok(true),
            Some(e) => {
                let mut vars = self.params.clone();
                vars.push(("n".to_string(), n as i64));
                Ok(e.eval(&Bindings(&vars))? != 0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("line {line}: expected 10 '|'-separated fields, got {got}")]
    FieldCount { line: usize, got: usize },
    #[error("line {line}: {field}: {source}")]
    Field {
        line: usize,
        field: &'static str,
        source: IntExprError,
    },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("line {line}: duplicate id '{id}'")]
    DuplicateId { line: usize, id: String },
    #[error("claim {id}: {message}")]
    Instance { id: String, message: String },
    #[error("reading registry: {0}")]
    Io(String),
}

fn optional(text: &str) -> Option<&str> {
    match text {
        "" | "-" => None,
        t => Some(t),
    }
}

/// Parses `id | k | A | r | modulus | predicate | params | index | status | source`.
///
/// `k` is `*` for unrestricted `PD` or an integer expression; `A`, `r` and
/// `modulus` are integer expressions over the parameters; `predicate` is
/// `zero`, `match EXPR` or `closed EXPR` with `n` the progression index;
/// `params` is a `;`-separated list of `VAR in LO..HI`, `VAR in {..}` or
/// boolean filters; `index` is a boolean expression in `n` (or `-`).
pub fn parse_registry(text: &str) -> Result<Vec<Claim>, RegistryError> {
    let mut claims = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = t.split('|').map(str::trim).collect();
        if f.len() != 10 {
            return Err(RegistryError::FieldCount { line, got: f.len() });
        }
        let expr = |field: &'static str, t: &str| {
            parse_int_expr(t).map_err(|source| RegistryError::Field {
                line,
                field,
                source,
            })
        };
        let family = match f[1] {
            "*" => None,
            t => Some(expr("k", t)?),
        };
        let predicate = if f[5] == "zero" {
            Predicate::Zero
        } else if let Some(rest) = f[5].strip_prefix("match ") {
            Predicate::Match(expr("predicate", rest)?)
        } else if let Some(rest) = f[5].strip_prefix("closed ") {
            Predicate::Closed(expr("predicate", rest)?)
        } else {
            return Err(RegistryError::Invalid {
                line,
                message: format!(
                    "predicate must be zero, match EXPR or closed EXPR, got '{}'",
                    f[5]
                ),
            });
        };
        let params = match optional(f[6]) {
            None => Vec::new(),
            Some(p) => p
                .split(';')
                .map(|s| {
                    parse_param(s).map_err(|source| RegistryError::Field {
                        line,
                        field: "params",
                        source,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?,
        };
        let index = optional(f[7]).map(|t| expr("index", t)).transpose()?;
        let status = f[8]
            .parse()
            .map_err(|message| RegistryError::Invalid { line, message })?;
        let id = f[0].to_string();
        if !seen.insert(id.clone()) {
            return Err(RegistryError::DuplicateId { line, id });
        }
        claims.push(Claim {
            id,
            family,
            step: expr("A", f[2])?,
            residue: expr("r", f[3])?,
            modulus: expr("modulus", f[4])?,
            predicate,
            predicate_text: f[5].to_string(),
            params,
            index,
            index_text: optional(f[7]).map(str::to_string),
            status,
            source: f[9].to_string(),
        });
    }
    Ok(claims)
}

pub fn builtin_registry() -> Vec<Claim> {
    parse_registry(BUILTIN_REGISTRY).expect("built-in registry parses")
}

pub fn builtin_registry_text() -> &'static str {
    BUILTIN_REGISTRY
}

pub fn load_registry(path: &Path) -> Result<Vec<Claim>, RegistryError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RegistryError::Io(format!("{}: {e}", path.display())))?;
    parse_registry(&text)
}

impl Claim {
    /// Every parameter assignment, in the order the parameter lists give them.
    pub fn instances(&self) -> Result<Vec<ClaimInstance>, RegistryError> {
        let bad = |message: String| RegistryError::Instance {
            id: self.id.clone(),
            message,
        };
        let assignments = expand_params(&self.params, |e, b| e.eval(&Bindings(b)))
            .map_err(|e| bad(e.to_string()))?;
        let mut out = Vec::with_capacity(assignments.len());
        for params in assignments {
            let env = Bindings(&params);
            let eval = |e: &IntExpr| e.eval(&env).map_err(|err| bad(err.to_string()));
            let k = match &self.family {
                None => None,
                Some(e) => {
                    let k = eval(e)?;
                    if k < 2 {
                        return Err(bad(format!("k = {k} must be at least 2")));
                    }
                    Some(k as u64)
                }
            };
            let (step, residue, modulus) = (
                eval(&self.step)?,
                eval(&self.residue)?,
                eval(&self.modulus)?,
            );
            if step < 1 || residue < 0 || residue >= step {
                return Err(bad(format!(
                    "progression ({step}, {residue}) needs 0 <= r < A"
                )));
            }
            if modulus < 2 {
                return Err(bad(format!("modulus {modulus} must be at least 2")));
            }
            out.push(ClaimInstance {
                claim_id: self.id.clone(),
                status: self.status,
                params,
                k,
                step: step as u64,
                residue: residue as u64,
                modulus: modulus as u64,
                predicate: self.predicate.clone(),
                predicate_text: self.predicate_text.clone(),
                index: self.index.clone(),
                index_text: self.index_text.clone(),
            });
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_registry_expands() {
        let claims = builtin_registry();
        for c in &claims {
            let inst = c.instances().unwrap();
            assert!(!inst.is_empty(), "{} has no instances", c.id);
        }
        let c34 = claims.iter().find(|c| c.id == "C-34").unwrap();
        let inst = c34.instances().unwrap();
        // l = 3: nonresidues mod 4 are 2, 3
        let l3: Vec<u64> = inst
            .iter()
            .filter(|i| i.k == Some(8))
            .map(|i| i.residue)
            .collect();
        assert_eq!(l3, vec![4, 6]);
        let x96 = claims.iter().find(|c| c.id == "X-96").unwrap();
        let r: Vec<u64> = x96.instances().unwrap().iter().map(|i| i.residue).collect();
        assert_eq!(r, vec![15, 33, 45, 51]);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(
            parse_registry("A | 2 | 3 | 0 | 2 | zero | - | - | proven"),
            Err(RegistryError::FieldCount { got: 9, .. })
        ));
        assert!(matches!(
            parse_registry("A | 2 | 3 | 0 | 2 | maybe | - | - | proven | s"),
            Err(RegistryError::Invalid { .. })
        ));
        let c = parse_registry("A | 2 | 3 | 3 | 2 | zero | - | - | proven | s").unwrap();
        assert!(c[0].instances().is_err());
        let c = parse_registry("A | 1 | 3 | 0 | 2 | zero | - | - | proven | s").unwrap();
        assert!(c[0].instances().is_err());
    }
}
