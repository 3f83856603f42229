//! Combinatorial ground truth.
//!
//! Nothing here touches the series engine: designated-summand counts come from
//! partition enumeration, and the representation numbers `a`, `a*`, `c`, `d`,
//! `e`, `e*`, `r` from direct lattice-point enumeration. These are the
//! independent side of every series/closed-form comparison in the verifier.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::Ratio;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::par::{self, Parallelism};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CounterError {
    #[error("representation counter needs at least one term")]
    NoTerms,
    #[error("representation coefficients must be positive")]
    ZeroCoefficient,
    #[error("parameter {name} must be at least {min}, got {got}")]
    Parameter {
        name: &'static str,
        min: u64,
        got: u64,
    },
}

fn require(name: &'static str, min: u64, got: u64) -> Result<(), CounterError> {
    if got < min {
        return Err(CounterError::Parameter { name, min, got });
    }
    Ok(())
}

pub fn is_square(n: u64) -> bool {
    let r = n.sqrt();
    r * r == n
}

// ---------------------------------------------------------------------------
// Designated summands

/// Sum over partitions of `n` (parts allowed by `allowed`) of the weight
/// `prod_{distinct sizes} w(multiplicity)`, by recursion on (remaining, largest part).
fn weighted_partitions(n: u64, allowed: impl Fn(u64) -> bool, w: impl Fn(u64) -> u64) -> BigInt {
    struct Ctx<'a> {
        allowed: &'a dyn Fn(u64) -> bool,
        w: &'a dyn Fn(u64) -> u64,
        memo: HashMap<(u64, u64), BigInt>,
    }
    fn go(ctx: &mut Ctx<'_>, rem: u64, max: u64) -> BigInt {
        if rem == 0 {
            return BigInt::one();
        }
        if max == 0 {
            return BigInt::zero();
        }
        let max = max.min(rem);
        if let Some(v) = ctx.memo.get(&(rem, max)) {
            return v.clone();
        }
        let mut total = go(ctx, rem, max - 1);
        if (ctx.allowed)(max) {
            let mut c = 1;
            while c * max <= rem {
                let weight = (ctx.w)(c);
                if weight != 0 {
                    total += go(ctx, rem - c * max, max - 1) * weight;
                }
                c += 1;
            }
        }
        ctx.memo.insert((rem, max), total.clone());
        total
    }
    let mut ctx = Ctx {
        allowed: &allowed,
        w: &w,
        memo: HashMap::new(),
    };
    go(&mut ctx, n, n)
}

/// `PD(n)`: partitions of `n` with one designated part per part size.
pub fn oracle_pd(n: u64) -> BigInt {
    weighted_partitions(n, |_| true, |c| c)
}

/// `PD_k(n)`: as [`oracle_pd`], with no part divisible by `k`.
pub fn oracle_pdk(k: u64, n: u64) -> Result<BigInt, CounterError> {
    require("k", 2, k)?;
    Ok(weighted_partitions(n, |p| p % k != 0, |c| c))
}

/// `b_n`: partitions of `n` in which every part has odd multiplicity.
pub fn odd_multiplicity_count(n: u64) -> BigInt {
    weighted_partitions(n, |_| true, |c| c % 2)
}

/// Coefficient arithmetic for the product tables: exact, or residues mod `m`.
trait TableCoeff: Clone {
    fn empty() -> Self;
    fn unit() -> Self;
    fn add(&mut self, other: &Self, m: u64);
    fn sub(&mut self, other: &Self, m: u64);
}

impl TableCoeff for BigInt {
    fn empty() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn add(&mut self, other: &Self, _: u64) {
        *self += other;
    }
    fn sub(&mut self, other: &Self, _: u64) {
        *self -= other;
    }
}

impl TableCoeff for u64 {
    fn empty() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn add(&mut self, other: &Self, m: u64) {
        *self = (*self + other) % m;
    }
    fn sub(&mut self, other: &Self, m: u64) {
        *self = (*self + m - other) % m;
    }
}

/// Coefficients through `q^n_max` of `prod_{s>=1} N(q^s) / (1 - q^{period s})`,
/// where `N(x) = sum_j numer[j] x^j` with `numer[j]` in `{-1, 0, 1}`.
fn product_table<T: TableCoeff>(n_max: usize, numer: &[i8], period: usize, m: u64) -> Vec<T> {
    let mut table = vec![T::empty(); n_max + 1];
    table[0] = T::unit();
    for s in 1..=n_max {
        let lag = period * s;
        for t in lag..=n_max {
            let prev = table[t - lag].clone();
            table[t].add(&prev, m);
        }
        for t in (s..=n_max).rev() {
            let mut acc = if numer[0] == 1 {
                table[t].clone()
            } else {
                T::empty()
            };
            for (j, &c) in numer.iter().enumerate().skip(1) {
                if j * s > t || c == 0 {
                    continue;
                }
                if c > 0 {
                    acc.add(&table[t - j * s], m);
                } else {
                    acc.sub(&table[t - j * s], m);
                }
            }
            table[t] = acc;
        }
    }
    table
}

/// Each part size contributes `1 + x + x^3 + ... = (1 + x - x^2) / (1 - x^2)`.
const ODD_MULTIPLICITY: [i8; 3] = [1, 1, -1];

/// `b_0..=b_{n_max}`, one linear pass per part size.
pub fn odd_multiplicity_table(n_max: usize) -> Vec<BigInt> {
    product_table(n_max, &ODD_MULTIPLICITY, 2, 0)
}

/// `b_0..=b_{n_max}` reduced modulo `m`.
pub fn odd_multiplicity_table_mod(n_max: usize, m: u64) -> Vec<u64> {
    product_table(n_max, &ODD_MULTIPLICITY, 2, m)
}

// ---------------------------------------------------------------------------
// Representation numbers

/// Which integers a variable of a [`RepresentationCounter`] may take.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    /// `k >= 0` with `3 ∤ k`, or `k = 0`.
    NonnegNot3OrZero,
    /// Any integer when even, positive integers only when odd.
    ParitySplit,
    AllInt,
    Nonneg,
    PositiveOdd,
}

impl Domain {
    /// How many admissible values `k` have `|k| = v`.
    pub fn multiplicity(self, v: u64) -> u64 {
        match self {
            Domain::NonnegNot3OrZero => (v == 0 || !v.is_multiple_of(3)) as u64,
            Domain::ParitySplit => match v {
                0 => 1,
                _ if v.is_multiple_of(2) => 2,
                _ => 1,
            },
            Domain::AllInt => 1 + (v != 0) as u64,
            Domain::Nonneg => 1,
            Domain::PositiveOdd => (v % 2 == 1) as u64,
        }
    }
}

/// Counts solutions of `n = sum_i c_i k_i^2` with each `k_i` ranging over its domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentationCounter {
    terms: Vec<(u64, Domain)>,
}

impl RepresentationCounter {
    pub fn new(mut terms: Vec<(u64, Domain)>) -> Result<Self, CounterError> {
        if terms.is_empty() {
            return Err(CounterError::NoTerms);
        }
        if terms.iter().any(|(c, _)| *c == 0) {
            return Err(CounterError::ZeroCoefficient);
        }
        // Largest coefficient outermost: fewest iterations at the top of the nest.
        terms.sort_by_key(|t| std::cmp::Reverse(t.0));
        Ok(RepresentationCounter { terms })
    }

    pub fn terms(&self) -> &[(u64, Domain)] {
        &self.terms
    }

    pub fn count(&self, n: u64) -> u64 {
        self.count_from(0, n)
    }

    fn count_from(&self, idx: usize, rem: u64) -> u64 {
        let (c, dom) = self.terms[idx];
        if idx + 1 == self.terms.len() {
            if !rem.is_multiple_of(c) || !is_square(rem / c) {
                return 0;
            }
            return dom.multiplicity((rem / c).sqrt());
        }
        let mut total = 0;
        for v in 0..=(rem / c).sqrt() {
            let mult = dom.multiplicity(v);
            if mult != 0 {
                total += mult * self.count_from(idx + 1, rem - c * v * v);
            }
        }
        total
    }

    /// Counts for every `n` in `0..=n_max` by enumerating all lattice points
    /// once; the outermost variable is split across workers.
    pub fn table(&self, n_max: usize, par: Parallelism) -> Vec<u64> {
        let (c0, d0) = self.terms[0];
        let outer = (n_max as u64 / c0).sqrt() as usize + 1;
        par::fold_range(
            par,
            outer,
            || vec![0u64; n_max + 1],
            |hist, v| {
                let v = v as u64;
                let mult = d0.multiplicity(v);
                if mult != 0 {
                    self.scatter(1, c0 * v * v, mult, n_max as u64, hist);
                }
            },
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
    }

    fn scatter(&self, idx: usize, sum: u64, weight: u64, n_max: u64, hist: &mut [u64]) {
        if idx == self.terms.len() {
            hist[sum as usize] += weight;
            return;
        }
        let (c, dom) = self.terms[idx];
        for v in 0..=((n_max - sum) / c).sqrt() {
            let mult = dom.multiplicity(v);
            if mult != 0 {
                self.scatter(idx + 1, sum + c * v * v, weight * mult, n_max, hist);
            }
        }
    }
}

/// `n = sum_{m<l} 2^m k_m^2` with each `k_m >= 0`, `3 ∤ k_m` or `k_m = 0`.
pub fn a_counter(l: u32) -> Result<RepresentationCounter, CounterError> {
    require("l", 1, l as u64)?;
    RepresentationCounter::new(
        (0..l)
            .map(|m| (1u64 << m, Domain::NonnegNot3OrZero))
            .collect(),
    )
}

/// `n = k_0^2 + 2^{l-1} k_1^2` over the same domain as [`a_counter`].
pub fn a_star_counter(l: u32) -> Result<RepresentationCounter, CounterError> {
    require("l", 2, l as u64)?;
    RepresentationCounter::new(vec![
        (1, Domain::NonnegNot3OrZero),
        (1 << (l - 1), Domain::NonnegNot3OrZero),
    ])
}

/// `n = k_0^2 + sum_{m=1}^{l-1} 3^m (k_m^2 + k_m'^2) + 3^l k_l^2`, parity-split domains.
pub fn e_counter(l: u32) -> Result<RepresentationCounter, CounterError> {
    require("l", 1, l as u64)?;
    let mut terms = vec![(1, Domain::ParitySplit), (3u64.pow(l), Domain::ParitySplit)];
    for m in 1..l {
        terms.push((3u64.pow(m), Domain::ParitySplit));
        terms.push((3u64.pow(m), Domain::ParitySplit));
    }
    RepresentationCounter::new(terms)
}

/// `n = k_0^2 + k_0'^2 + 3^{l-1}(k_1^2 + k_1'^2)`, parity-split domains.
pub fn e_star_counter(l: u32) -> Result<RepresentationCounter, CounterError> {
    require("l", 2, l as u64)?;
    let c = 3u64.pow(l - 1);
    RepresentationCounter::new(vec![
        (1, Domain::ParitySplit),
        (1, Domain::ParitySplit),
        (c, Domain::ParitySplit),
        (c, Domain::ParitySplit),
    ])
}

pub fn count_a(n: u64, l: u32) -> Result<u64, CounterError> {
    Ok(a_counter(l)?.count(n))
}

pub fn count_a_star(n: u64, l: u32) -> Result<u64, CounterError> {
    Ok(a_star_counter(l)?.count(n))
}

pub fn count_e(n: u64, l: u32) -> Result<u64, CounterError> {
    Ok(e_counter(l)?.count(n))
}

pub fn count_e_star(n: u64, l: u32) -> Result<u64, CounterError> {
    Ok(e_star_counter(l)?.count(n))
}

/// `r(n)`: nonnegative `(k, m)` with `n = k(k+1) + 3m(m+1) + 1`.
pub fn count_r(n: u64) -> Result<u64, CounterError> {
    require("n", 1, n)?;
    let mut total = 0;
    let mut m = 0;
    while 3 * m * (m + 1) < n {
        let rest = n - 1 - 3 * m * (m + 1);
        // k(k+1) = rest  <=>  (2k+1)^2 = 4 rest + 1
        let d = 4 * rest + 1;
        if is_square(d) {
            total += 1;
        }
        m += 1;
    }
    Ok(total)
}

/// Solutions of `4n = k_0^2 + 3 k_1^2` in positive odd integers.
pub fn count_odd_form(n: u64) -> u64 {
    RepresentationCounter::new(vec![(1, Domain::PositiveOdd), (3, Domain::PositiveOdd)])
        .expect("valid terms")
        .count(4 * n)
}

/// Each size `m` contributes `sum_{v mod 12 < 4} x^v = (1 + x + x^2 + x^3) / (1 - x^12)`,
/// counting `v = 12 a_m + b_m` with `b_m in {0,1,2,3}`.
const RESIDUE_ASSIGNMENT: [i8; 4] = [1, 1, 1, 1];

/// Adds a triangular contribution `3 k_0 (k_0+1)/2` to every residue assignment.
fn with_triangular<T: TableCoeff>(d: Vec<T>, m: u64) -> Vec<T> {
    let mut out = vec![T::empty(); d.len()];
    for (n, slot) in out.iter_mut().enumerate() {
        let mut k0 = 0;
        while 3 * k0 * (k0 + 1) / 2 <= n {
            slot.add(&d[n - 3 * k0 * (k0 + 1) / 2], m);
            k0 += 1;
        }
    }
    out
}

/// `c_0..=c_{n_max}`: pairs of a triangular contribution `3 k_0 (k_0+1)/2` and
/// an assignment `m -> (a_m, b_m)`, `b_m in {0,1,2,3}`, with
/// `sum_m m (12 a_m + b_m)` making up the rest of `n`.
pub fn count_c_table(n_max: usize) -> Vec<BigInt> {
    with_triangular(product_table(n_max, &RESIDUE_ASSIGNMENT, 12, 0), 0)
}

/// `c_0..=c_{n_max}` reduced modulo `m`.
pub fn count_c_table_mod(n_max: usize, m: u64) -> Vec<u64> {
    with_triangular(product_table(n_max, &RESIDUE_ASSIGNMENT, 12, m), m)
}

pub fn count_c(n: u64) -> BigInt {
    count_c_table(n as usize).pop().expect("nonempty")
}

/// `3j(3j-1)` for all integers `j` with value at most `n_max`, ascending.
fn d_values(n_max: u64) -> Vec<u64> {
    let mut vals = vec![0];
    for j in 1u64.. {
        let pos = 3 * j * (3 * j - 1);
        let neg = 3 * j * (3 * j + 1);
        if pos > n_max {
            break;
        }
        vals.push(pos);
        if neg <= n_max {
            vals.push(neg);
        }
    }
    vals.sort_unstable();
    vals
}

/// `d_n`: integer pairs `(j, k)` with `n = 3j(3j-1) + 3k(3k-1)`.
pub fn count_d(n: u64) -> u64 {
    let vals = d_values(n);
    let set: BTreeSet<u64> = vals.iter().copied().collect();
    vals.iter().filter(|&&v| set.contains(&(n - v))).count() as u64
}

pub fn count_d_table(n_max: usize) -> Vec<u64> {
    let vals = d_values(n_max as u64);
    let mut out = vec![0u64; n_max + 1];
    for &a in &vals {
        for &b in &vals {
            if let Some(slot) = out.get_mut((a + b) as usize) {
                *slot += 1;
            }
        }
    }
    out
}

/// 1 iff `n = m k^2` for some `m | 6` and `k >= 0`.
pub fn pd4_closed_form(n: u64) -> u8 {
    [1, 2, 3, 6]
        .iter()
        .any(|&m| n.is_multiple_of(m) && is_square(n / m)) as u8
}

pub type Rational = Ratio<i64>;

/// `Ψ(a, b) = ((a + 4b)/3, (2a - b)/3)`, an involution preserving `a^2 + 2b^2`.
pub fn psi_involution(a: Rational, b: Rational) -> (Rational, Rational) {
    let three = Rational::from_integer(3);
    ((a + b * 4) / three, (a * 2 - b) / three)
}

/// `{ x^2 mod m : 0 <= x < m }`.
pub fn quadratic_residues(m: u64) -> Result<BTreeSet<u64>, CounterError> {
    require("m", 2, m)?;
    Ok((0..m).map(|x| x * x % m).collect())
}

/// True iff `s = 4^a (8b + 1)` for some `a, b >= 0`.
pub fn is_form_4a_8b1(mut s: u64) -> bool {
    if s == 0 {
        return false;
    }
    while s.is_multiple_of(4) {
        s /= 4;
    }
    s % 8 == 1
}
