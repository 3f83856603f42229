//! Truncated q-series arithmetic and a verifier for congruences of partitions
//! with designated summands.
//!
//! * [`series`]: exact and modular truncated power series.
//! * [`qfactory`]: `f_k`, eta quotients, Pochhammer products, theta functions,
//!   `pd`, `pd_k`, `g`, `h`.
//! * [`counters`]: brute-force partition oracles and representation counters.
//! * [`identities`]: an expression language over those series and a ledger of
//!   identities checked to a finite truncation.
//! * [`verify`]: the claim registry, the mod-2 recurrence, the range verifier
//!   and the congruence miner.
//!
//! All identity and congruence checks are finite-truncation checks.

pub mod counters;
pub mod identities;
pub mod par;
pub mod qfactory;
pub mod series;
pub mod verify;

pub use par::Parallelism;
pub use series::{Ring, SeriesError, TruncatedSeries};
