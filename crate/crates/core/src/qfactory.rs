//! Constructors for the named q-series: `f_k`, eta quotients, Pochhammer
//! products, Ramanujan theta functions and the designated-summand
//! generating functions `pd`, `pd_k`, `g`, `h`.
//!
//! Everything is built from first principles: `f_1` from the generalized
//! pentagonal numbers, theta functions from their quadratic exponents.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::series::{Ring, SeriesError, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactoryError {
    #[error("eta quotient has no factors")]
    EmptyQuotient,
    #[error("invalid eta factor f_{scale}^{exponent}")]
    InvalidFactor { scale: u64, exponent: i64 },
    #[error("scale must be at least {min}, got {got}")]
    InvalidScale { min: u64, got: u64 },
    #[error("theta exponents must be positive, got ({0}, {1})")]
    InvalidTheta(u64, u64),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Nonzero terms `(exponent, ±1)` of `f_1 = (q;q)_inf` up to `precision`,
/// from `sum_j (-1)^j q^{j(3j-1)/2}` over all integers `j`.
pub fn pentagonal_terms(precision: usize) -> Vec<(usize, i64)> {
    let mut terms = vec![(0usize, 1i64)];
    for j in 1usize.. {
        let sign = if j % 2 == 1 { -1 } else { 1 };
        let lo = j * (3 * j - 1) / 2;
        if lo > precision {
            break;
        }
        terms.push((lo, sign));
        let hi = j * (3 * j + 1) / 2;
        if hi <= precision {
            terms.push((hi, sign));
        }
    }
    terms.sort_unstable();
    terms
}

/// `f_1 = (q;q)_inf` via Euler's pentagonal number theorem.
pub fn euler_f1(precision: usize, ring: Ring) -> TruncatedSeries {
    TruncatedSeries::from_terms(pentagonal_terms(precision), precision, ring)
}

/// `f_k = f_1(q^k)`.
pub fn fk(k: u64, precision: usize, ring: Ring) -> Result<TruncatedSeries, FactoryError> {
    if k < 1 {
        return Err(FactoryError::InvalidScale { min: 1, got: k });
    }
    Ok(euler_f1(precision, ring).substitute_power(k)?)
}

/// A finite product `prod f_k^{e_k}` with positive scales and nonzero exponents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EtaQuotientSpec {
    factors: Vec<(u64, i64)>,
}

impl EtaQuotientSpec {
    pub fn new(factors: Vec<(u64, i64)>) -> Result<Self, FactoryError> {
        if factors.is_empty() {
            return Err(FactoryError::EmptyQuotient);
        }
        if let Some(&(scale, exponent)) = factors.iter().find(|(k, e)| *k == 0 || *e == 0) {
            return Err(FactoryError::InvalidFactor { scale, exponent });
        }
        Ok(EtaQuotientSpec { factors })
    }

    pub fn factors(&self) -> &[(u64, i64)] {
        &self.factors
    }

    /// `pd(q) = f_6 / (f_1 f_2 f_3)`.
    pub fn pd() -> Self {
        EtaQuotientSpec {
            factors: vec![(6, 1), (1, -1), (2, -1), (3, -1)],
        }
    }

    /// `g(q) = 1/pd(q) = f_1 f_2 f_3 / f_6`.
    pub fn g() -> Self {
        EtaQuotientSpec {
            factors: vec![(1, 1), (2, 1), (3, 1), (6, -1)],
        }
    }

    /// `h(q) = f_1^2 / f_2`.
    pub fn h() -> Self {
        EtaQuotientSpec {
            factors: vec![(1, 2), (2, -1)],
        }
    }

    /// The eight-factor generating function of `PD_k`:
    /// `f_6 f_k f_{2k} f_{3k} / (f_1 f_2 f_3 f_{6k})`.
    pub fn pdk(k: u64) -> Result<Self, FactoryError> {
        if k < 2 {
            return Err(FactoryError::InvalidScale { min: 2, got: k });
        }
        Self::new(vec![
            (6, 1),
            (k, 1),
            (2 * k, 1),
            (3 * k, 1),
            (1, -1),
            (2, -1),
            (3, -1),
            (6 * k, -1),
        ])
    }
}

impl fmt::Display for EtaQuotientSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "f{k}")?;
            } else {
                write!(f, "f{k}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Evaluates `prod f_k^{e_k}` with one sparse multiply (or divide) per unit
/// of exponent, which keeps the cost at `O(N^{3/2})` per factor.
pub fn eta_quotient(
    spec: &EtaQuotientSpec,
    precision: usize,
    ring: Ring,
) -> Result<TruncatedSeries, FactoryError> {
    let mut acc = TruncatedSeries::one(precision, ring);
    // Numerators first keeps intermediate coefficients small on the exact lane.
    let mut order: Vec<&(u64, i64)> = spec.factors.iter().collect();
    order.sort_by_key(|(_, e)| std::cmp::Reverse(*e));
    for &(k, e) in order {
        let f = fk(k, precision, ring)?;
        for _ in 0..e.unsigned_abs() {
            acc = if e > 0 { acc.mul(&f)? } else { acc.div(&f)? };
        }
    }
    Ok(acc)
}

/// `(q^a; q^b)_inf = prod_{j>=0} (1 - q^{a + j b})`, dropping factors whose
/// leading exponent exceeds the precision.
pub fn pochhammer(
    a: u64,
    b: u64,
    precision: usize,
    ring: Ring,
) -> Result<TruncatedSeries, FactoryError> {
    if a < 1 || b < 1 {
        return Err(FactoryError::InvalidScale {
            min: 1,
            got: a.min(b),
        });
    }
    let mut acc = TruncatedSeries::one(precision, ring);
    let mut e = a as usize;
    while e <= precision {
        let factor = TruncatedSeries::from_terms([(0, 1), (e, -1)], precision, ring);
        acc = acc.mul(&factor)?;
        e += b as usize;
    }
    Ok(acc)
}

/// Ramanujan's theta functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ThetaSpec {
    /// `phi(q) = sum_{n in Z} q^{n^2}`
    Phi,
    /// `psi(q) = sum_{n >= 0} q^{n(n+1)/2}`
    Psi,
    /// `f(a, b)` with `a = s1 q^x`, `b = s2 q^y`.
    General { x: u64, y: u64, s1: i8, s2: i8 },
}

impl ThetaSpec {
    pub fn general(x: u64, y: u64, s1: i8, s2: i8) -> Result<Self, FactoryError> {
        if x == 0 || y == 0 || s1.abs() != 1 || s2.abs() != 1 {
            return Err(FactoryError::InvalidTheta(x, y));
        }
        Ok(ThetaSpec::General { x, y, s1, s2 })
    }
}

/// Exponent `x n(n+1)/2 + y n(n-1)/2` and sign of the `n`-th term of `f(a, b)`.
fn general_theta_term(x: u64, y: u64, s1: i8, s2: i8, n: i64) -> (u64, i64) {
    let up = (n * (n + 1) / 2) as u64;
    let down = (n * (n - 1) / 2) as u64;
    let mut sign = 1i64;
    if s1 < 0 && up % 2 == 1 {
        sign = -sign;
    }
    if s2 < 0 && down % 2 == 1 {
        sign = -sign;
    }
    (x * up + y * down, sign)
}

pub fn theta(
    spec: ThetaSpec,
    precision: usize,
    ring: Ring,
) -> Result<TruncatedSeries, FactoryError> {
    let n_max = precision as u64;
    let terms: Vec<(usize, i64)> = match spec {
        ThetaSpec::Phi => (0u64..)
            .take_while(|n| n * n <= n_max)
            .map(|n| (n * n) as usize)
            .flat_map(|e| {
                if e == 0 {
                    vec![(0, 1)]
                } else {
                    vec![(e, 1), (e, 1)]
                }
            })
            .collect(),
        ThetaSpec::Psi => (0u64..)
            .map(|n| n * (n + 1) / 2)
            .take_while(|&e| e <= n_max)
            .map(|e| (e as usize, 1))
            .collect(),
        ThetaSpec::General { x, y, s1, s2 } => {
            if x == 0 || y == 0 {
                return Err(FactoryError::InvalidTheta(x, y));
            }
            let mut terms = vec![(0usize, 1i64)];
            // Exponents grow in |n| on both sides, so scan outward until both exceed N.
            for n in 1i64.. {
                let (ep, sp) = general_theta_term(x, y, s1, s2, n);
                let (en, sn) = general_theta_term(x, y, s1, s2, -n);
                if ep > n_max && en > n_max {
                    break;
                }
                if ep <= n_max {
                    terms.push((ep as usize, sp));
                }
                if en <= n_max {
                    terms.push((en as usize, sn));
                }
            }
            terms
        }
    };
    Ok(TruncatedSeries::from_terms(terms, precision, ring))
}

/// `sum_{n>=0} PD(n) q^n`.
pub fn pd_series(precision: usize, ring: Ring) -> Result<TruncatedSeries, FactoryError> {
    eta_quotient(&EtaQuotientSpec::pd(), precision, ring)
}

/// `g(q) = 1 / pd(q)`.
pub fn g_series(precision: usize, ring: Ring) -> Result<TruncatedSeries, FactoryError> {
    eta_quotient(&EtaQuotientSpec::g(), precision, ring)
}

/// `h(q) = f_1^2 / f_2`.
pub fn h_series(precision: usize, ring: Ring) -> Result<TruncatedSeries, FactoryError> {
    eta_quotient(&EtaQuotientSpec::h(), precision, ring)
}

/// `sum_{n>=0} PD_k(n) q^n`, from the eight-factor eta quotient.
pub fn pdk_series(k: u64, precision: usize, ring: Ring) -> Result<TruncatedSeries, FactoryError> {
    eta_quotient(&EtaQuotientSpec::pdk(k)?, precision, ring)
}

/// The same series as [`pdk_series`], computed as `g(q^k) / g(q)`.
pub fn pdk_series_via_g(
    k: u64,
    precision: usize,
    ring: Ring,
) -> Result<TruncatedSeries, FactoryError> {
    if k < 2 {
        return Err(FactoryError::InvalidScale { min: 2, got: k });
    }
    let g = g_series(precision, ring)?;
    Ok(g.substitute_power(k)?.div(&g)?)
}

/// Sparse sums `sum q^{v^2}` over the nonnegative integers selected by `keep`.
pub fn square_sum(precision: usize, ring: Ring, keep: impl Fn(u64) -> bool) -> TruncatedSeries {
    let terms = (0u64..)
        .take_while(|v| v * v <= precision as u64)
        .filter(|&v| keep(v))
        .map(|v| ((v * v) as usize, 1));
    TruncatedSeries::from_terms(terms, precision, ring)
}

/// `prod_{n>=1} (1 + sum_{k>=0} q^{(2k+1) n})`, the generating function of
/// partitions in which every multiplicity is odd.
pub fn odd_multiplicity_product(
    precision: usize,
    ring: Ring,
) -> Result<TruncatedSeries, FactoryError> {
    let mut acc = TruncatedSeries::one(precision, ring);
    for n in 1..=precision {
        let terms =
            std::iter::once((0usize, 1i64)).chain((n..=precision).step_by(2 * n).map(|e| (e, 1)));
        acc = acc.mul(&TruncatedSeries::from_terms(terms, precision, ring))?;
    }
    Ok(acc)
}
