//! Searches arithmetic progressions for coefficients that vanish modulo `m`.
//!
//! A mined candidate only says the congruence held on the tested range; it is
//! evidence, not proof.

use serde::Serialize;

use super::engine::{family_series, VerifyError};
use super::registry::{Claim, ClaimInstance, ClaimStatus};
use crate::par::{self, Parallelism};
use crate::series::TruncatedSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateStatus {
    /// Implied by a proven registry claim.
    Known,
    Conjectural,
}

impl std::fmt::Display for CandidateStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CandidateStatus::Known => "known",
            CandidateStatus::Conjectural => "conjectural",
        })
    }
}

/// `PD_k(A n + r) ≡ 0 (mod m)` for every tested `n >= n_min`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub k: u64,
    pub m: u64,
    #[serde(rename = "A")]
    pub step: u64,
    pub r: u64,
    pub support: u64,
    pub status: CandidateStatus,
    /// `0`, or `1` when the congruence only fails at `n = 0`.
    pub n_min: u64,
    /// Registry claim this candidate falls under, if any.
    pub registry_id: Option<String>,
}

#[derive(Clone, Debug)]
pub struct MineOptions {
    pub k: u64,
    pub m: u64,
    pub a_max: u64,
    /// Largest argument `A n + r` tested.
    pub n_max: u64,
    pub min_support: u64,
    /// Drop progressions implied by a smaller mined progression.
    pub primitive_only: bool,
    pub parallelism: Parallelism,
}

impl MineOptions {
    pub fn new(k: u64, m: u64, a_max: u64, n_max: u64) -> Self {
        MineOptions {
            k,
            m,
            a_max,
            n_max,
            min_support: 20,
            primitive_only: false,
            parallelism: Parallelism::default(),
        }
    }

    fn validate(&self) -> Result<(), VerifyError> {
        let check = |ok: bool, what: String| {
            if ok {
                Ok(())
            } else {
                Err(VerifyError::Parameter(what))
            }
        };
        check(self.k >= 2, format!("k must be at least 2, got {}", self.k))?;
        check(self.m >= 2, format!("m must be at least 2, got {}", self.m))?;
        check(
            self.a_max >= 2,
            format!("A_max must be at least 2, got {}", self.a_max),
        )?;
        check(
            self.min_support >= 10,
            format!("min_support must be at least 10, got {}", self.min_support),
        )
    }
}

/// Whether every argument `A n + r` with `n >= n_min` and `lo <= A n + r <= hi`
/// has coefficient `≡ 0 (mod m)`; returns the number of arguments tested.
pub fn progression_vanishes(
    series: &TruncatedSeries,
    m: u64,
    step: u64,
    r: u64,
    n_min: u64,
    lo: u64,
    hi: u64,
) -> Option<u64> {
    let mut tested = 0;
    let mut arg = step * n_min + r;
    if arg < lo {
        arg += (lo - arg).div_ceil(step) * step;
    }
    while arg <= hi {
        if series.residue(arg as usize, m) != 0 {
            return None;
        }
        tested += 1;
        arg += step;
    }
    Some(tested)
}

fn scan_step(series: &TruncatedSeries, opts: &MineOptions, step: u64) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    for r in 0..step.min(opts.n_max + 1) {
        let all = progression_vanishes(series, opts.m, step, r, 0, 0, opts.n_max);
        let found = match all {
            Some(s) => Some((0, s)),
            None => progression_vanishes(series, opts.m, step, r, 1, 0, opts.n_max).map(|s| (1, s)),
        };
        if let Some((n_min, support)) = found {
            if support >= opts.min_support {
                out.push((r, n_min, support));
            }
        }
    }
    out
}

/// Whether `(step, r, n_min)` covers a subset of the arguments of `(s2, r2, n2)`.
fn implied_by(step: u64, r: u64, n_min: u64, s2: u64, r2: u64, n2: u64) -> bool {
    s2 < step && step.is_multiple_of(s2) && r % s2 == r2 && step * n_min + r >= s2 * n2 + r2
}

fn registry_match<'a>(
    cand: &Candidate,
    instances: &'a [ClaimInstance],
) -> Option<&'a ClaimInstance> {
    let first_arg = cand.step * cand.n_min + cand.r;
    let last_arg = cand.step * (cand.n_min + cand.support.saturating_sub(1)) + cand.r;
    instances.iter().find(|inst| {
        if inst.k != Some(cand.k) || !inst.predicate.is_zero() || inst.modulus % cand.m != 0 {
            return false;
        }
        if !cand.step.is_multiple_of(inst.step)
            || cand.r % inst.step != inst.residue
            || first_arg < inst.residue
        {
            return false;
        }
        // Every argument of the candidate must sit at an index the claim selects.
        let mut arg = first_arg;
        while arg <= last_arg {
            let idx = (arg - inst.residue) / inst.step;
            if !inst.index_selected(idx).unwrap_or(false) {
                return false;
            }
            arg += cand.step;
        }
        true
    })
}

/// Mines `PD_k(A n + r) ≡ 0 (mod m)` over `2 <= A <= a_max`, `0 <= r < A`, with
/// arguments up to `n_max`. Results are sorted by `(A, r)`. Candidates covered
/// by a proven registry claim are labelled known; others conjectural.
pub fn mine_congruences(
    opts: &MineOptions,
    registry: &[Claim],
) -> Result<Vec<Candidate>, VerifyError> {
    opts.validate()?;
    let series = family_series(Some(opts.k), opts.m, opts.n_max as usize)?;
    mine_with_series(opts, registry, &series)
}

pub fn mine_with_series(
    opts: &MineOptions,
    registry: &[Claim],
    series: &TruncatedSeries,
) -> Result<Vec<Candidate>, VerifyError> {
    opts.validate()?;
    let steps: Vec<u64> = (2..=opts.a_max).collect();
    let found = par::map(opts.parallelism, steps, |step| {
        scan_step(series, opts, step)
            .into_iter()
            .map(move |(r, n_min, support)| (step, r, n_min, support))
            .collect::<Vec<_>>()
    });
    let mut raw: Vec<(u64, u64, u64, u64)> = found.into_iter().flatten().collect();
    raw.sort();

    let mut instances = Vec::new();
    for c in registry {
        instances.extend(c.instances()?);
    }
    let mut out: Vec<Candidate> = Vec::new();
    for &(step, r, n_min, support) in &raw {
        if opts.primitive_only
            && raw
                .iter()
                .any(|&(s2, r2, n2, _)| implied_by(step, r, n_min, s2, r2, n2))
        {
            continue;
        }
        let mut cand = Candidate {
            k: opts.k,
            m: opts.m,
            step,
            r,
            support,
            status: CandidateStatus::Conjectural,
            n_min,
            registry_id: None,
        };
        if let Some(inst) = registry_match(&cand, &instances) {
            cand.registry_id = Some(inst.claim_id.clone());
            if inst.status == ClaimStatus::Proven {
                cand.status = CandidateStatus::Known;
            }
        }
        out.push(cand);
    }
    Ok(out)
}

/// Re-tests candidates on arguments in `(lo, hi]`; returns those that fail.
pub fn retest_candidates<'a>(
    candidates: &'a [Candidate],
    series: &TruncatedSeries,
    lo: u64,
    hi: u64,
) -> Vec<&'a Candidate> {
    candidates
        .iter()
        .filter(|c| progression_vanishes(series, c.m, c.step, c.r, c.n_min, lo + 1, hi).is_none())
        .collect()
}
