use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;
use std::time::Instant;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use super::env::CounterEnv;
use super::intexpr::{Env, IntExprError};
use super::registry::{Claim, ClaimInstance, ClaimStatus, RegistryError};
use crate::par::{self, Parallelism};
use crate::qfactory::{self, FactoryError};
use crate::series::{Ring, TruncatedSeries};

/// Failures kept in a report; `failure_count` has the total.
pub const MAX_REPORTED_FAILURES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Factory(#[from] FactoryError),
    #[error("claim {claim}: {source}")]
    Expression { claim: String, source: IntExprError },
    #[error(
        "claim {claim}: series known to q^{precision}, but arguments up to {needed} are required"
    )]
    InsufficientPrecision {
        claim: String,
        precision: usize,
        needed: u64,
    },
    #[error("claim {claim}: series over {ring} cannot be read modulo {modulus}")]
    IncompatibleRing {
        claim: String,
        ring: Ring,
        modulus: u64,
    },
    #[error("unknown claim id '{0}'")]
    UnknownClaim(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Proven claim, no failures in range.
    Verified,
    /// Proven claim with failures: a bug somewhere.
    Failed,
    /// Conjecture holding on the whole range.
    Consistent,
    /// Conjecture refuted in range.
    Counterexample,
}

impl Verdict {
    pub fn passed(self) -> bool {
        matches!(self, Verdict::Verified | Verdict::Consistent)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Verified => "verified",
            Verdict::Failed => "failed",
            Verdict::Consistent => "consistent",
            Verdict::Counterexample => "counterexample",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    /// Progression index.
    pub n: u64,
    /// `A n + r`.
    pub argument: u64,
    pub expected: u64,
    pub actual: u64,
}

fn ordered_params<S: Serializer>(params: &[(String, i64)], s: S) -> Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(params.len()))?;
    for (k, v) in params {
        map.serialize_entry(k, v)?;
    }
    map.end()
}

/// Outcome of checking one claim instance over a range of arguments.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub claim_id: String,
    pub status: ClaimStatus,
    pub verdict: Verdict,
    pub family: String,
    #[serde(serialize_with = "ordered_params")]
    pub params: Vec<(String, i64)>,
    pub step: u64,
    pub residue: u64,
    pub modulus: u64,
    pub predicate: String,
    pub index_filter: Option<String>,
    /// Largest argument `A n + r` allowed.
    pub argument_max: u64,
    /// First and last progression index actually checked.
    pub n_first: Option<u64>,
    pub n_last: Option<u64>,
    pub support: u64,
    pub failure_count: u64,
    pub failures: Vec<Failure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    /// Smallest failing argument, the witness for a refuted conjecture.
    pub fn first_failure(&self) -> Option<&Failure> {
        self.failures.first()
    }
}

/// Precision and ring needed for a claim family.
pub type SeriesKey = (Option<u64>, u64);

/// `PD_k` (or `PD` for `None`) modulo `m` through `q^precision`.
pub fn family_series(
    k: Option<u64>,
    m: u64,
    precision: usize,
) -> Result<TruncatedSeries, FactoryError> {
    let ring = Ring::Mod(m);
    match k {
        Some(k) => qfactory::pdk_series(k, precision, ring),
        None => qfactory::pd_series(precision, ring),
    }
}

fn instance_error(inst: &ClaimInstance) -> impl Fn(IntExprError) -> VerifyError + '_ {
    move |source| VerifyError::Expression {
        claim: inst.claim_id.clone(),
        source,
    }
}

/// Checks `inst` on every argument `A n + r <= argument_max` against a series
/// that the caller supplies. Fails if the series is not known that far or
/// cannot be read modulo the claim's modulus.
pub fn verify_instance_with_series(
    inst: &ClaimInstance,
    series: &TruncatedSeries,
    argument_max: u64,
) -> Result<VerificationReport, VerifyError> {
    let m = inst.modulus;
    match series.modulus() {
        Some(own) if own % m == 0 => {}
        None => {}
        Some(_) => {
            return Err(VerifyError::IncompatibleRing {
                claim: inst.claim_id.clone(),
                ring: series.ring(),
                modulus: m,
            })
        }
    }
    let count = if argument_max >= inst.residue {
        (argument_max - inst.residue) / inst.step + 1
    } else {
        0
    };
    if count > 0 {
        let needed = inst.step * (count - 1) + inst.residue;
        if (series.precision() as u64) < needed {
            return Err(VerifyError::InsufficientPrecision {
                claim: inst.claim_id.clone(),
                precision: series.precision(),
                needed,
            });
        }
    }
    let wrap = instance_error(inst);
    let mut env = CounterEnv::new(inst.params.clone(), m, count.saturating_sub(1) as usize);
    let mut support = 0;
    let mut n_first = None;
    let mut n_last = None;
    let mut failures = Vec::new();
    let mut failure_count = 0;
    for n in 0..count {
        if !inst.index_selected(n).map_err(&wrap)? {
            continue;
        }
        let argument = inst.step * n + inst.residue;
        let actual = series.residue(argument as usize, m);
        let expected = match inst.predicate.expr() {
            None => 0,
            Some(e) => {
                env.set_var("n", n as i64);
                e.eval(&env).map_err(&wrap)?.rem_euclid(m as i64) as u64
            }
        };
        support += 1;
        n_first.get_or_insert(n);
        n_last = Some(n);
        if actual != expected {
            failure_count += 1;
            if failures.len() < MAX_REPORTED_FAILURES {
                failures.push(Failure {
                    n,
                    argument,
                    expected,
                    actual,
                });
            }
        }
    }
    let verdict = match (inst.status, failure_count == 0) {
        (ClaimStatus::Proven, true) => Verdict::Verified,
        (ClaimStatus::Proven, false) => Verdict::Failed,
        (ClaimStatus::Conjectural, true) => Verdict::Consistent,
        (ClaimStatus::Conjectural, false) => Verdict::Counterexample,
    };
    Ok(VerificationReport {
        claim_id: inst.claim_id.clone(),
        status: inst.status,
        verdict,
        family: inst.family_name(),
        params: inst.params.clone(),
        step: inst.step,
        residue: inst.residue,
        modulus: m,
        predicate: inst.predicate_text.clone(),
        index_filter: inst.index_text.clone(),
        argument_max,
        n_first,
        n_last,
        support,
        failure_count,
        failures,
        elapsed_ms: None,
    })
}

/// Options for a verification run.
#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Largest argument `A n + r` checked.
    pub argument_max: u64,
    pub parallelism: Parallelism,
    /// Record wall-clock time per instance (makes output nondeterministic).
    pub timings: bool,
}

impl VerifyOptions {
    pub fn new(argument_max: u64) -> Self {
        VerifyOptions {
            argument_max,
            parallelism: Parallelism::default(),
            timings: false,
        }
    }
}

/// Verifies every instance of every claim. Each needed series is computed once
/// to precision `argument_max`; reports come back in registry order.
pub fn verify_claims(
    claims: &[Claim],
    opts: VerifyOptions,
) -> Result<Vec<VerificationReport>, VerifyError> {
    let mut instances = Vec::new();
    for c in claims {
        instances.extend(c.instances()?);
    }
    verify_instances(&instances, opts)
}

pub fn verify_instances(
    instances: &[ClaimInstance],
    opts: VerifyOptions,
) -> Result<Vec<VerificationReport>, VerifyError> {
    let keys: BTreeSet<SeriesKey> = instances.iter().map(|i| (i.k, i.modulus)).collect();
    let precision = opts.argument_max as usize;
    let built = par::map(opts.parallelism, keys.into_iter().collect(), |(k, m)| {
        family_series(k, m, precision).map(|s| ((k, m), Arc::new(s)))
    });
    let mut cache: HashMap<SeriesKey, Arc<TruncatedSeries>> = HashMap::new();
    for entry in built {
        let (key, series) = entry?;
        cache.insert(key, series);
    }
    let results = par::map(opts.parallelism, instances.iter().collect(), |inst| {
        let start = Instant::now();
        let series = &cache[&(inst.k, inst.modulus)];
        verify_instance_with_series(inst, series, opts.argument_max).map(|mut r| {
            if opts.timings {
                r.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            r
        })
    });
    results.into_iter().collect()
}

/// Verifies one claim, optionally restricted to a single parameter assignment.
pub fn verify_claim(
    claim: &Claim,
    params: Option<&[(String, i64)]>,
    opts: VerifyOptions,
) -> Result<Vec<VerificationReport>, VerifyError> {
    let mut instances = claim.instances()?;
    if let Some(wanted) = params {
        instances.retain(|i| {
            wanted
                .iter()
                .all(|(k, v)| i.params.as_slice().var(k) == Some(*v))
        });
        if instances.is_empty() {
            return Err(VerifyError::Parameter(format!(
                "no instance of {} matches {wanted:?}",
                claim.id
            )));
        }
    }
    verify_instances(&instances, opts)
}

/// Looks up claims by id; `all` selects the whole registry.
pub fn select_claims<'a>(
    registry: &'a [Claim],
    ids: &[String],
) -> Result<Vec<&'a Claim>, VerifyError> {
    if ids.iter().any(|i| i == "all") {
        return Ok(registry.iter().collect());
    }
    ids.iter()
        .map(|id| {
            registry
                .iter()
                .find(|c| &c.id == id)
                .ok_or_else(|| VerifyError::UnknownClaim(id.clone()))
        })
        .collect()
}

/// Runs every conjectural claim. A failing report carries the smallest
/// counterexample first.
pub fn check_conjectures(
    registry: &[Claim],
    opts: VerifyOptions,
) -> Result<Vec<VerificationReport>, VerifyError> {
    if opts.argument_max < 100 {
        return Err(VerifyError::Parameter(format!(
            "conjecture checks need n_max >= 100, got {}",
            opts.argument_max
        )));
    }
    let conjectures: Vec<Claim> = registry
        .iter()
        .filter(|c| c.status == ClaimStatus::Conjectural)
        .cloned()
        .collect();
    verify_claims(&conjectures, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::registry::{builtin_registry, parse_registry};

    fn claim(id: &str) -> Claim {
        builtin_registry().into_iter().find(|c| c.id == id).unwrap()
    }

    #[test]
    fn thirty_two_progression_for_pd4() {
        let c = claim("C-33a");
        let reports = verify_claim(&c, Some(&[("r".into(), 5)]), VerifyOptions::new(2000)).unwrap();
        assert_eq!(reports.len(), 1);
        let r = &reports[0];
        assert_eq!(r.verdict, Verdict::Verified);
        assert_eq!(r.support, 63);
        assert_eq!(r.n_last, Some(62));
    }

    #[test]
    fn pd3_even_arguments() {
        let reports = verify_claim(&claim("C-86a"), None, VerifyOptions::new(2000)).unwrap();
        assert_eq!(reports[0].verdict, Verdict::Verified);
        assert_eq!(reports[0].n_first, Some(1));
        assert_eq!(reports[0].n_last, Some(1000));
    }

    #[test]
    fn false_claim_fails_at_first_odd_value() {
        let c = parse_registry("NEG | 2 | 2 | 0 | 2 | zero | - | - | proven | negative control")
            .unwrap();
        let r = &verify_claim(&c[0], None, VerifyOptions::new(200)).unwrap()[0];
        assert_eq!(r.verdict, Verdict::Failed);
        // PD_2(0) = 1 is already odd; the first nonzero argument is 4 = 2^2.
        assert_eq!(r.failures[0].argument, 0);
        assert_eq!(r.failures[1].argument, 4);
        assert_eq!(
            r.failures.len().min(MAX_REPORTED_FAILURES),
            r.failures.len()
        );
    }

    #[test]
    fn shifted_conjecture_is_refuted() {
        let c =
            parse_registry("X | 2 | 16 | 13 | 4 | zero | - | - | conjectural | shifted").unwrap();
        let r = &check_conjectures(&c, VerifyOptions::new(3000)).unwrap()[0];
        assert_eq!(r.verdict, Verdict::Counterexample);
        assert!(r.first_failure().is_some());
    }

    #[test]
    fn under_provisioned_series_is_refused() {
        let inst = &claim("C-85a").instances().unwrap()[0];
        let s = family_series(Some(3), 3, 100).unwrap();
        assert!(matches!(
            verify_instance_with_series(inst, &s, 500),
            Err(VerifyError::InsufficientPrecision { .. })
        ));
        let s = family_series(Some(3), 2, 600).unwrap();
        assert!(matches!(
            verify_instance_with_series(inst, &s, 500),
            Err(VerifyError::IncompatibleRing { .. })
        ));
        let s = qfactory::pdk_series(3, 600, Ring::Exact).unwrap();
        assert!(verify_instance_with_series(inst, &s, 500).unwrap().passed());
    }

    #[test]
    fn selection() {
        let reg = builtin_registry();
        assert_eq!(
            select_claims(&reg, &["all".into()]).unwrap().len(),
            reg.len()
        );
        assert!(matches!(
            select_claims(&reg, &["NOSUCH".into()]),
            Err(VerifyError::UnknownClaim(_))
        ));
    }
}
