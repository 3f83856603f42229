//! The claim registry, the mod-2 recurrence, the range verifier and the
//! congruence miner.
//!
//! Every check here covers a finite range of arguments only.

mod engine;
mod env;
pub mod intexpr;
mod miner;
mod recurrence;
mod registry;

pub use engine::{
    check_conjectures, family_series, select_claims, verify_claim, verify_claims,
    verify_instance_with_series, verify_instances, Failure, Verdict, VerificationReport,
    VerifyError, VerifyOptions, MAX_REPORTED_FAILURES,
};
pub use env::{Bindings, CounterEnv, COUNTERS};
pub use miner::{
    mine_congruences, mine_with_series, progression_vanishes, retest_candidates, Candidate,
    CandidateStatus, MineOptions,
};
pub use recurrence::recurrence_pdk_mod2;
pub use registry::{
    builtin_registry, builtin_registry_text, load_registry, parse_registry, Claim, ClaimInstance,
    ClaimStatus, Predicate, RegistryError,
};
