//! Truncated formal power series in one variable `q`.
//!
//! A [`TruncatedSeries`] stores the coefficients of `q^0..=q^N` together with
//! the precision `N`. Coefficients live in one of two lanes:
//!
//! * the exact lane, arbitrary-precision integers;
//! * the modular lane, canonical residues in `[0, m)` stored as machine words.
//!
//! Every binary operation truncates to the smaller precision of its operands,
//! so precision is always carried by the value itself. Values are immutable
//! once built and every operation is a pure function.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Coefficient ring of a series: the integers, or `Z/mZ` with `m >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    Exact,
    Mod(u64),
}

impl Ring {
    pub fn modulus(self) -> Option<u64> {
        match self {
            Ring::Exact => None,
            Ring::Mod(m) => Some(m),
        }
    }

    pub fn from_modulus(modulus: Option<u64>) -> Result<Ring, SeriesError> {
        match modulus {
            None => Ok(Ring::Exact),
            Some(m) if m >= 2 => Ok(Ring::Mod(m)),
            Some(m) => Err(SeriesError::InvalidModulus(m)),
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Exact => write!(f, "Z"),
            Ring::Mod(m) => write!(f, "Z/{m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("coefficient count {len} does not match precision {precision} (expected {})", precision + 1)]
    LengthMismatch { len: usize, precision: usize },
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("operands live in different rings ({0} vs {1})")]
    RingMismatch(Ring, Ring),
    #[error("constant term {constant} is not a unit in {ring}")]
    NotInvertible { constant: String, ring: Ring },
    #[error("cannot reduce a series over {from} modulo {to}")]
    IncompatibleModulus { from: Ring, to: u64 },
    #[error("substitution exponent must be at least 1, got {0}")]
    InvalidSubstitution(u64),
    #[error("progression residue {r} out of range for step {step}")]
    InvalidProgression { step: u64, r: u64 },
    #[error("precision {precision} too small to extract residue {r}")]
    InsufficientPrecision { precision: usize, r: u64 },
}

/// Operands with at most `4 * sqrt(N)` nonzero terms take the sparse path.
fn sparse_threshold(precision: usize) -> usize {
    4 * ((precision as f64).sqrt() as usize).max(1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Coeffs {
    Exact(Vec<BigInt>),
    Mod { m: u64, values: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Coeffs,
}

fn reduce_bigint(c: &BigInt, m: u64) -> u64 {
    let r = c.mod_floor(&BigInt::from(m));
    r.to_u64().expect("residue fits in u64")
}

fn reduce_i64(c: i64, m: u64) -> u64 {
    (c as i128).rem_euclid(m as i128) as u64
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

impl TruncatedSeries {
    /// Builds a series from explicit coefficients; `coeffs.len()` must be `precision + 1`.
    pub fn new(
        coeffs: Vec<BigInt>,
        precision: usize,
        modulus: Option<u64>,
    ) -> Result<Self, SeriesError> {
        if coeffs.len() != precision + 1 {
            return Err(SeriesError::LengthMismatch {
                len: coeffs.len(),
                precision,
            });
        }
        Ok(match Ring::from_modulus(modulus)? {
            Ring::Exact => TruncatedSeries {
                coeffs: Coeffs::Exact(coeffs),
            },
            Ring::Mod(m) => TruncatedSeries {
                coeffs: Coeffs::Mod {
                    m,
                    values: coeffs.iter().map(|c| reduce_bigint(c, m)).collect(),
                },
            },
        })
    }

    pub fn from_i64(
        coeffs: &[i64],
        precision: usize,
        modulus: Option<u64>,
    ) -> Result<Self, SeriesError> {
        Self::new(
            coeffs.iter().map(|&c| BigInt::from(c)).collect(),
            precision,
            modulus,
        )
    }

    pub fn zero(precision: usize, ring: Ring) -> Self {
        let coeffs = match ring {
            Ring::Exact => Coeffs::Exact(vec![BigInt::zero(); precision + 1]),
            Ring::Mod(m) => Coeffs::Mod {
                m,
                values: vec![0; precision + 1],
            },
        };
        TruncatedSeries { coeffs }
    }

    pub fn constant(c: i64, precision: usize, ring: Ring) -> Self {
        Self::monomial(0, c, precision, ring)
    }

    pub fn one(precision: usize, ring: Ring) -> Self {
        Self::constant(1, precision, ring)
    }

    /// `c * q^exponent`, which is zero when `exponent > precision`.
    pub fn monomial(exponent: usize, c: i64, precision: usize, ring: Ring) -> Self {
        Self::from_terms([(exponent, c)], precision, ring)
    }

    /// Sums `c * q^e` over the given terms; exponents beyond `precision` are dropped
    /// and repeated exponents accumulate.
    pub fn from_terms<I>(terms: I, precision: usize, ring: Ring) -> Self
    where
        I: IntoIterator<Item = (usize, i64)>,
    {
        let mut s = Self::zero(precision, ring);
        match &mut s.coeffs {
            Coeffs::Exact(v) => {
                for (e, c) in terms {
                    if e <= precision {
                        v[e] += c;
                    }
                }
            }
            Coeffs::Mod { m, values } => {
                for (e, c) in terms {
                    if e <= precision {
                        values[e] = (values[e] + reduce_i64(c, *m)) % *m;
                    }
                }
            }
        }
        s
    }

    pub fn precision(&self) -> usize {
        self.len() - 1
    }

    fn len(&self) -> usize {
        match &self.coeffs {
            Coeffs::Exact(v) => v.len(),
            Coeffs::Mod { values, .. } => values.len(),
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        self.ring().modulus()
    }

    pub fn ring(&self) -> Ring {
        match &self.coeffs {
            Coeffs::Exact(_) => Ring::Exact,
            Coeffs::Mod { m, .. } => Ring::Mod(*m),
        }
    }

    /// Coefficient of `q^n` (zero above the precision).
    pub fn coeff(&self, n: usize) -> BigInt {
        match &self.coeffs {
            Coeffs::Exact(v) => v.get(n).cloned().unwrap_or_default(),
            Coeffs::Mod { values, .. } => BigInt::from(values.get(n).copied().unwrap_or(0)),
        }
    }

    /// Coefficient of `q^n` reduced into `[0, m)`.
    pub fn residue(&self, n: usize, m: u64) -> u64 {
        match &self.coeffs {
            Coeffs::Exact(v) => v.get(n).map_or(0, |c| reduce_bigint(c, m)),
            Coeffs::Mod { m: own, values } => {
                debug_assert!(own % m == 0, "residue mod {m} from series mod {own}");
                values.get(n).map_or(0, |&c| c % m)
            }
        }
    }

    pub fn coeffs(&self) -> Vec<BigInt> {
        (0..self.len()).map(|n| self.coeff(n)).collect()
    }

    /// Residues of a modular-lane series; `None` on the exact lane.
    pub fn residues(&self) -> Option<&[u64]> {
        match &self.coeffs {
            Coeffs::Mod { values, .. } => Some(values),
            Coeffs::Exact(_) => None,
        }
    }

    pub fn is_zero_at(&self, n: usize) -> bool {
        match &self.coeffs {
            Coeffs::Exact(v) => v[n].is_zero(),
            Coeffs::Mod { values, .. } => values[n] == 0,
        }
    }

    pub fn nonzero_count(&self) -> usize {
        (0..self.len()).filter(|&n| !self.is_zero_at(n)).count()
    }

    /// Smallest exponent at which the two series differ, comparing up to the
    /// smaller precision. Both must live in the same ring.
    pub fn first_difference(&self, other: &Self) -> Result<Option<usize>, SeriesError> {
        self.check_ring(other)?;
        let n = self.len().min(other.len());
        Ok((0..n).find(|&i| match (&self.coeffs, &other.coeffs) {
            (Coeffs::Exact(a), Coeffs::Exact(b)) => a[i] != b[i],
            (Coeffs::Mod { values: a, .. }, Coeffs::Mod { values: b, .. }) => a[i] != b[i],
            _ => unreachable!(),
        }))
    }

    /// Drops coefficients above `precision` (no-op if already smaller).
    pub fn truncate(&self, precision: usize) -> Self {
        let keep = precision.min(self.precision()) + 1;
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => Coeffs::Exact(v[..keep].to_vec()),
            Coeffs::Mod { m, values } => Coeffs::Mod {
                m: *m,
                values: values[..keep].to_vec(),
            },
        };
        TruncatedSeries { coeffs }
    }

    fn check_ring(&self, other: &Self) -> Result<(), SeriesError> {
        if self.ring() != other.ring() {
            return Err(SeriesError::RingMismatch(self.ring(), other.ring()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_ring(other)?;
        let n = self.len().min(other.len());
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (Coeffs::Exact(a), Coeffs::Exact(b)) => {
                Coeffs::Exact((0..n).map(|i| &a[i] + &b[i]).collect())
            }
            (Coeffs::Mod { m, values: a }, Coeffs::Mod { values: b, .. }) => Coeffs::Mod {
                m: *m,
                values: (0..n).map(|i| (a[i] + b[i]) % m).collect(),
            },
            _ => unreachable!(),
        };
        Ok(TruncatedSeries { coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => Coeffs::Exact(v.iter().map(|c| -c).collect()),
            Coeffs::Mod { m, values } => Coeffs::Mod {
                m: *m,
                values: values.iter().map(|&c| (m - c) % m).collect(),
            },
        };
        TruncatedSeries { coeffs }
    }

    pub fn scale(&self, c: i64) -> Self {
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => Coeffs::Exact(v.iter().map(|x| x * c).collect()),
            Coeffs::Mod { m, values } => {
                let c = reduce_i64(c, *m);
                Coeffs::Mod {
                    m: *m,
                    values: values.iter().map(|&x| mul_mod(x, c, *m)).collect(),
                }
            }
        };
        TruncatedSeries { coeffs }
    }

    /// Multiplies by `q^shift`, keeping the precision.
    pub fn shift(&self, shift: usize) -> Self {
        let len = self.len();
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => Coeffs::Exact(
                (0..len)
                    .map(|i| {
                        if i >= shift {
                            v[i - shift].clone()
                        } else {
                            BigInt::zero()
                        }
                    })
                    .collect(),
            ),
            Coeffs::Mod { m, values } => Coeffs::Mod {
                m: *m,
                values: (0..len)
                    .map(|i| if i >= shift { values[i - shift] } else { 0 })
                    .collect(),
            },
        };
        TruncatedSeries { coeffs }
    }

    /// Nonzero terms as `(exponent, coefficient)`, or `None` once more than
    /// `limit` are found.
    fn sparse_terms(&self, limit: usize) -> Option<SparseTerms> {
        match &self.coeffs {
            Coeffs::Exact(v) => {
                let mut out = Vec::new();
                for (i, c) in v.iter().enumerate() {
                    if !c.is_zero() {
                        if out.len() == limit {
                            return None;
                        }
                        out.push((i, c.clone()));
                    }
                }
                Some(SparseTerms::Exact(out))
            }
            Coeffs::Mod { values, .. } => {
                let mut out = Vec::new();
                for (i, &c) in values.iter().enumerate() {
                    if c != 0 {
                        if out.len() == limit {
                            return None;
                        }
                        out.push((i, c));
                    }
                }
                Some(SparseTerms::Mod(out))
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_ring(other)?;
        let precision = self.precision().min(other.precision());
        let limit = sparse_threshold(precision);
        if let Some(terms) = self.truncate(precision).sparse_terms(limit) {
            return Ok(other.truncate(precision).mul_sparse(&terms));
        }
        if let Some(terms) = other.truncate(precision).sparse_terms(limit) {
            return Ok(self.truncate(precision).mul_sparse(&terms));
        }
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (Coeffs::Exact(a), Coeffs::Exact(b)) => {
                Coeffs::Exact(dense_mul_exact(&a[..=precision], &b[..=precision]))
            }
            (Coeffs::Mod { m, values: a }, Coeffs::Mod { values: b, .. }) => Coeffs::Mod {
                m: *m,
                values: dense_mul_mod(&a[..=precision], &b[..=precision], *m),
            },
            _ => unreachable!(),
        };
        Ok(TruncatedSeries { coeffs })
    }

    fn mul_sparse(&self, terms: &SparseTerms) -> Self {
        let len = self.len();
        let coeffs = match (&self.coeffs, terms) {
            (Coeffs::Exact(a), SparseTerms::Exact(t)) => {
                let mut out = vec![BigInt::zero(); len];
                for (e, c) in t {
                    for i in 0..len - e {
                        if !a[i].is_zero() {
                            out[i + e] += &a[i] * c;
                        }
                    }
                }
                Coeffs::Exact(out)
            }
            (Coeffs::Mod { m, values: a }, SparseTerms::Mod(t)) => {
                let m = *m;
                let mut out = vec![0u64; len];
                for &(e, c) in t {
                    for i in 0..len - e {
                        out[i + e] = (out[i + e] + mul_mod(a[i], c, m)) % m;
                    }
                }
                Coeffs::Mod { m, values: out }
            }
            _ => unreachable!(),
        };
        TruncatedSeries { coeffs }
    }

    /// `self / other`, i.e. the unique series `y` with `other * y = self` to the
    /// common precision. The constant term of `other` must be a unit.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_ring(other)?;
        let precision = self.precision().min(other.precision());
        let num = self.truncate(precision);
        let den = other.truncate(precision);
        let limit = sparse_threshold(precision);
        let den_terms = match den.sparse_terms(limit) {
            Some(t) => t,
            None => den.sparse_terms(usize::MAX).expect("unbounded"),
        };
        let coeffs = match (&num.coeffs, den_terms) {
            (Coeffs::Exact(a), SparseTerms::Exact(t)) => {
                let c0 = match t.first() {
                    Some((0, c)) if c.abs().is_one() => c.clone(),
                    Some((0, c)) => return Err(not_invertible(c.to_string(), Ring::Exact)),
                    _ => return Err(not_invertible("0".into(), Ring::Exact)),
                };
                let mut y: Vec<BigInt> = Vec::with_capacity(precision + 1);
                for n in 0..=precision {
                    let mut acc = a[n].clone();
                    for (e, c) in t.iter().skip(1) {
                        if *e > n {
                            break;
                        }
                        if !y[n - e].is_zero() {
                            acc -= c * &y[n - e];
                        }
                    }
                    // c0 is +1 or -1, so dividing is multiplying.
                    y.push(acc * &c0);
                }
                Coeffs::Exact(y)
            }
            (Coeffs::Mod { m, values: a }, SparseTerms::Mod(t)) => {
                let m = *m;
                let c0 = match t.first() {
                    Some(&(0, c)) => c,
                    _ => 0,
                };
                let inv = inverse_mod(c0, m)
                    .ok_or_else(|| not_invertible(c0.to_string(), Ring::Mod(m)))?;
                let mut y: Vec<u64> = Vec::with_capacity(precision + 1);
                if m <= 1 << 20 && t.len() < 1 << 23 {
                    // Residues below 2^20 let the inner sum run unreduced.
                    let neg: Vec<(usize, u64)> =
                        t.iter().skip(1).map(|&(e, c)| (e, m - c)).collect();
                    for n in 0..=precision {
                        let mut acc = a[n];
                        for &(e, c) in &neg {
                            if e > n {
                                break;
                            }
                            acc += c * y[n - e];
                        }
                        y.push(mul_mod(acc % m, inv, m));
                    }
                } else {
                    for n in 0..=precision {
                        let mut acc = a[n];
                        for &(e, c) in t.iter().skip(1) {
                            if e > n {
                                break;
                            }
                            acc = (acc + m - mul_mod(c, y[n - e], m)) % m;
                        }
                        y.push(mul_mod(acc, inv, m));
                    }
                }
                Coeffs::Mod { m, values: y }
            }
            _ => unreachable!(),
        };
        Ok(TruncatedSeries { coeffs })
    }

    /// Multiplicative inverse; the constant term must be a unit (`±1` exactly,
    /// or coprime to the modulus).
    pub fn invert(&self) -> Result<Self, SeriesError> {
        Self::one(self.precision(), self.ring()).div(self)
    }

    /// Integer power by repeated squaring; negative exponents go through
    /// [`invert`](Self::invert).
    pub fn pow(&self, e: i64) -> Result<Self, SeriesError> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut result = Self::one(self.precision(), self.ring());
        let mut square = base;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&square)?;
            }
            e >>= 1;
            if e > 0 {
                square = square.mul(&square)?;
            }
        }
        Ok(result)
    }

    /// The substitution `q -> q^k`; coefficients pushed beyond the precision are dropped.
    pub fn substitute_power(&self, k: u64) -> Result<Self, SeriesError> {
        if k == 0 {
            return Err(SeriesError::InvalidSubstitution(k));
        }
        let k = k as usize;
        let len = self.len();
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => {
                let mut out = vec![BigInt::zero(); len];
                for (n, c) in v.iter().enumerate().take((len - 1) / k + 1) {
                    out[n * k] = c.clone();
                }
                Coeffs::Exact(out)
            }
            Coeffs::Mod { m, values } => {
                let mut out = vec![0; len];
                for (n, &c) in values.iter().enumerate().take((len - 1) / k + 1) {
                    out[n * k] = c;
                }
                Coeffs::Mod { m: *m, values: out }
            }
        };
        Ok(TruncatedSeries { coeffs })
    }

    /// `q -> q^k` into a series of the given precision; `self` must already
    /// hold every coefficient up to `floor(precision / k)`.
    pub fn substitute_power_into(&self, k: u64, precision: usize) -> Result<Self, SeriesError> {
        if k == 0 {
            return Err(SeriesError::InvalidSubstitution(k));
        }
        let need = precision / k as usize;
        if self.precision() < need {
            return Err(SeriesError::InsufficientPrecision {
                precision: self.precision(),
                r: need as u64,
            });
        }
        let padded = match &self.coeffs {
            Coeffs::Exact(v) => {
                let mut v = v[..=need].to_vec();
                v.resize(precision + 1, BigInt::zero());
                Coeffs::Exact(v)
            }
            Coeffs::Mod { m, values } => {
                let mut v = values[..=need].to_vec();
                v.resize(precision + 1, 0);
                Coeffs::Mod { m: *m, values: v }
            }
        };
        TruncatedSeries { coeffs: padded }.substitute_power(k)
    }

    /// Coefficients at `step * n + r`, as a series in `n` of precision
    /// `floor((N - r) / step)`.
    pub fn extract_progression(&self, step: u64, r: u64) -> Result<Self, SeriesError> {
        if step == 0 || r >= step {
            return Err(SeriesError::InvalidProgression { step, r });
        }
        let precision = self.precision();
        if r as usize > precision {
            return Err(SeriesError::InsufficientPrecision { precision, r });
        }
        let (step, r) = (step as usize, r as usize);
        let idx = (r..=precision).step_by(step);
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => Coeffs::Exact(idx.map(|i| v[i].clone()).collect()),
            Coeffs::Mod { m, values } => Coeffs::Mod {
                m: *m,
                values: idx.map(|i| values[i]).collect(),
            },
        };
        Ok(TruncatedSeries { coeffs })
    }

    /// Reduces into `Z/mZ`. A modular series can only be reduced to a divisor
    /// of its own modulus.
    pub fn reduce_mod(&self, m: u64) -> Result<Self, SeriesError> {
        if m < 2 {
            return Err(SeriesError::InvalidModulus(m));
        }
        let values = match &self.coeffs {
            Coeffs::Exact(v) => v.iter().map(|c| reduce_bigint(c, m)).collect(),
            Coeffs::Mod { m: own, values } => {
                if own % m != 0 {
                    return Err(SeriesError::IncompatibleModulus {
                        from: self.ring(),
                        to: m,
                    });
                }
                values.iter().map(|&c| c % m).collect()
            }
        };
        Ok(TruncatedSeries {
            coeffs: Coeffs::Mod { m, values },
        })
    }

    /// Brings the series into `ring` (reducing if it is exact).
    pub fn into_ring(self, ring: Ring) -> Result<Self, SeriesError> {
        match ring {
            r if r == self.ring() => Ok(self),
            Ring::Mod(m) => self.reduce_mod(m),
            Ring::Exact => Err(SeriesError::RingMismatch(self.ring(), Ring::Exact)),
        }
    }
}

fn not_invertible(constant: String, ring: Ring) -> SeriesError {
    SeriesError::NotInvertible { constant, ring }
}

enum SparseTerms {
    Exact(Vec<(usize, BigInt)>),
    Mod(Vec<(usize, u64)>),
}

fn bits_needed(v: &[BigInt]) -> u64 {
    v.iter().map(|c| c.bits()).max().unwrap_or(0)
}

fn dense_mul_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let len = a.len();
    let log_len = 64 - (len as u64).leading_zeros() as u64;
    if bits_needed(a) + bits_needed(b) + log_len < 126 {
        let a: Vec<i128> = a.iter().map(|c| c.to_i128().expect("fits")).collect();
        let b: Vec<i128> = b.iter().map(|c| c.to_i128().expect("fits")).collect();
        let mut out = vec![0i128; len];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (o, &y) in out[i..].iter_mut().zip(&b[..len - i]) {
                *o += x * y;
            }
        }
        return out.into_iter().map(BigInt::from).collect();
    }
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (o, y) in out[i..].iter_mut().zip(&b[..len - i]) {
            if !y.is_zero() {
                *o += x * y;
            }
        }
    }
    out
}

fn dense_mul_mod(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    let len = a.len();
    if m <= 1 << 20 && len < 1 << 23 {
        // Each product is below 2^40 and at most 2^23 of them are summed.
        let mut out = vec![0u64; len];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (o, &y) in out[i..].iter_mut().zip(&b[..len - i]) {
                *o += x * y;
            }
        }
        out.iter_mut().for_each(|c| *c %= m);
        return out;
    }
    let mut out = vec![0u128; len];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (o, &y) in out[i..].iter_mut().zip(&b[..len - i]) {
            *o = (*o + x as u128 * y as u128) % m as u128;
        }
    }
    out.into_iter().map(|c| c as u64).collect()
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for n in 0..self.len() {
            if self.is_zero_at(n) {
                continue;
            }
            let c = self.coeff(n);
            let (neg, mag) = (c.is_negative(), c.abs());
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
                (true, false) => {}
            }
            first = false;
            match n {
                0 => write!(f, "{mag}")?,
                _ if mag.is_one() => {}
                _ => write!(f, "{mag}*")?,
            }
            match n {
                0 => {}
                1 => write!(f, "q")?,
                _ => write!(f, "q^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.len())?;
        if let Some(m) = self.modulus() {
            write!(f, " (mod {m})")?;
        }
        Ok(())
    }
}

/// JSON form: `{"coefficients": ["1", "-2", ...], "precision": N, "modulus": m|null}`.
impl Serialize for TruncatedSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let coefficients: Vec<String> = self.coeffs().iter().map(|c| c.to_string()).collect();
        let mut st = serializer.serialize_struct("TruncatedSeries", 3)?;
        st.serialize_field("coefficients", &coefficients)?;
        st.serialize_field("precision", &self.precision())?;
        st.serialize_field("modulus", &self.modulus())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(c: &[i64]) -> TruncatedSeries {
        TruncatedSeries::from_i64(c, c.len() - 1, None).unwrap()
    }

    fn modular(c: &[i64], m: u64) -> TruncatedSeries {
        TruncatedSeries::from_i64(c, c.len() - 1, Some(m)).unwrap()
    }

    /// Brute-force expansion of prod_{n=1}^{N} (1 - q^n), truncated at N.
    fn brute_euler(n: usize) -> Vec<i64> {
        let mut acc = vec![0i64; n + 1];
        acc[0] = 1;
        for part in 1..=n {
            for i in (part..=n).rev() {
                acc[i] -= acc[i - part];
            }
        }
        acc
    }

    #[test]
    fn make_series_normalizes() {
        assert_eq!(
            exact(&[1, 0, 0]).coeffs(),
            vec![1.into(), 0.into(), 0.into()]
        );
        assert_eq!(modular(&[5, -3], 4).residues().unwrap(), &[1, 1]);
        assert_eq!(brute_euler(5), vec![1, -1, -1, 0, 0, 1]);
        assert_eq!(exact(&brute_euler(5)).coeffs().len(), 6);
    }

    #[test]
    fn make_series_errors() {
        assert_eq!(
            TruncatedSeries::from_i64(&[1, 2], 2, None),
            Err(SeriesError::LengthMismatch {
                len: 2,
                precision: 2
            })
        );
        assert_eq!(
            TruncatedSeries::from_i64(&[1], 0, Some(1)),
            Err(SeriesError::InvalidModulus(1))
        );
    }

    #[test]
    fn arithmetic_examples() {
        let p = exact(&[1, 1, 0]).mul(&exact(&[1, -1, 0])).unwrap();
        assert_eq!(p, exact(&[1, 0, -1]));
        let s = modular(&[1, 1], 4).add(&modular(&[1, 3], 4)).unwrap();
        assert_eq!(s, modular(&[2, 0], 4));
        assert!(matches!(
            modular(&[1], 4).add(&exact(&[1])),
            Err(SeriesError::RingMismatch(..))
        ));
        assert!(modular(&[1], 4).mul(&modular(&[1], 3)).is_err());
    }

    #[test]
    fn binary_ops_truncate_to_min_precision() {
        let a = exact(&[1, 2, 3, 4]);
        let b = exact(&[1, 1]);
        assert_eq!(a.add(&b).unwrap().precision(), 1);
        assert_eq!(a.mul(&b).unwrap(), exact(&[1, 3]));
    }

    #[test]
    fn euler_inverse_is_identity() {
        let f1 = exact(&brute_euler(50));
        let inv = f1.invert().unwrap();
        assert_eq!(f1.mul(&inv).unwrap(), TruncatedSeries::one(50, Ring::Exact));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(
            exact(&[1, -1, 0, 0]).invert().unwrap(),
            exact(&[1, 1, 1, 1])
        );
        assert_eq!(exact(&[-1, 0]).invert().unwrap(), exact(&[-1, 0]));
        assert!(matches!(
            modular(&[2, 1, 0], 4).invert(),
            Err(SeriesError::NotInvertible { .. })
        ));
        assert!(exact(&[2, 1]).invert().is_err());
        // 3 is a unit mod 4.
        let a = modular(&[3, 1, 2], 4);
        assert_eq!(a.mul(&a.invert().unwrap()).unwrap(), modular(&[1, 0, 0], 4));
    }

    #[test]
    fn power_examples() {
        assert_eq!(exact(&[1, 1, 0]).pow(2).unwrap(), exact(&[1, 2, 1]));
        assert_eq!(exact(&[1, -1, 0, 0]).pow(-1).unwrap(), exact(&[1, 1, 1, 1]));
        assert_eq!(exact(&[7, 3]).pow(0).unwrap(), exact(&[1, 0]));
    }

    #[test]
    fn substitute_and_extract_examples() {
        assert_eq!(
            exact(&[1, 1, 0, 0, 0]).substitute_power(3).unwrap(),
            exact(&[1, 0, 0, 1, 0])
        );
        assert!(exact(&[1]).substitute_power(0).is_err());
        assert_eq!(
            exact(&[1, 2, 3, 4]).extract_progression(2, 1).unwrap(),
            exact(&[2, 4])
        );
        assert!(exact(&[1, 2]).extract_progression(2, 2).is_err());
        assert!(matches!(
            exact(&[1, 2]).extract_progression(5, 3),
            Err(SeriesError::InsufficientPrecision { .. })
        ));
        let f1 = exact(&brute_euler(30));
        let direct: Vec<i64> = {
            let mut acc = vec![0i64; 31];
            acc[0] = 1;
            for part in (2..=30).step_by(2) {
                for i in (part..=30).rev() {
                    acc[i] -= acc[i - part];
                }
            }
            acc
        };
        assert_eq!(f1.substitute_power(2).unwrap(), exact(&direct));
        let half = exact(&brute_euler(15));
        assert_eq!(half.substitute_power_into(2, 30).unwrap(), exact(&direct));
        assert!(half.substitute_power_into(2, 40).is_err());
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(
            exact(&[3, -1, 6]).reduce_mod(3).unwrap(),
            modular(&[0, 2, 0], 3)
        );
        let x = exact(&[7, -5, 10, 3]);
        assert_eq!(
            x.reduce_mod(4).unwrap().reduce_mod(2).unwrap(),
            x.reduce_mod(2).unwrap()
        );
        assert!(matches!(
            modular(&[1, 2], 4).reduce_mod(3),
            Err(SeriesError::IncompatibleModulus { .. })
        ));
        assert!(exact(&[1]).reduce_mod(1).is_err());
    }

    #[test]
    fn sparse_and_dense_paths_agree() {
        let dense: Vec<i64> = (0..200).map(|i| (i * 7 % 11) as i64 - 5).collect();
        let sparse: Vec<i64> = (0..200).map(|i| if i % 37 == 0 { 3 } else { 0 }).collect();
        let a = exact(&dense);
        let b = exact(&sparse);
        let via_sparse = a.mul(&b).unwrap();
        let via_dense = TruncatedSeries {
            coeffs: Coeffs::Exact(dense_mul_exact(&a.coeffs(), &b.coeffs())),
        };
        assert_eq!(via_sparse, via_dense);
        let (am, bm) = (a.reduce_mod(7).unwrap(), b.reduce_mod(7).unwrap());
        assert_eq!(am.mul(&bm).unwrap(), via_dense.reduce_mod(7).unwrap());
    }

    #[test]
    fn big_coefficients_leave_i128_path() {
        let big: BigInt = BigInt::from(1u8) << 100;
        let a = TruncatedSeries::new(vec![big.clone(); 40], 39, None).unwrap();
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq.coeff(39), &big * &big * 40);
    }

    #[test]
    fn large_modulus_uses_wide_accumulator() {
        let m = (1u64 << 40) + 15;
        let v: Vec<i64> = (0..100)
            .map(|i| (i as i64 * 1_234_567_891) % m as i64)
            .collect();
        let a = modular(&v, m);
        let e = exact(&v);
        assert_eq!(
            a.mul(&a).unwrap(),
            e.mul(&e).unwrap().reduce_mod(m).unwrap()
        );
        assert_eq!(
            a.div(&modular(&brute_euler(99), m)).unwrap(),
            e.div(&exact(&brute_euler(99)))
                .unwrap()
                .reduce_mod(m)
                .unwrap()
        );
    }

    #[test]
    fn display_and_json() {
        assert_eq!(exact(&[1, -1, -1, 0]).to_string(), "1 - q - q^2 + O(q^4)");
        assert_eq!(modular(&[0, 2], 3).to_string(), "2*q + O(q^2) (mod 3)");
    }
}
