use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::expr::{Expr, NamedSeries};
use crate::counters::odd_multiplicity_table;
use crate::qfactory::{self, FactoryError};
use crate::series::{Ring, SeriesError, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Factory(#[from] FactoryError),
}

/// Evaluates `e` to a series of the given precision, reducing modulo
/// `modulus` at every node when one is given.
///
/// `subst(e, k)` only needs `e` to precision `N / k`, and `part(e, A, r)`
/// evaluates `e` to `A N + r`, so every node comes back at precision `N`.
pub fn evaluate(
    e: &Expr,
    precision: usize,
    modulus: Option<u64>,
) -> Result<TruncatedSeries, EvalError> {
    let ring = Ring::from_modulus(modulus)?;
    eval_in(e, precision, ring)
}

fn eval_in(e: &Expr, n: usize, ring: Ring) -> Result<TruncatedSeries, EvalError> {
    Ok(match e {
        Expr::Int(v) => {
            let mut coeffs = vec![BigInt::zero(); n + 1];
            coeffs[0] = BigInt::from(*v);
            TruncatedSeries::new(coeffs, n, ring.modulus())?
        }
        Expr::QPow(j) => TruncatedSeries::monomial(*j as usize, 1, n, ring),
        Expr::Eta(k) => qfactory::fk(*k, n, ring)?,
        Expr::Poch(a, b) => qfactory::pochhammer(*a, *b, n, ring)?,
        Expr::Theta(spec) => qfactory::theta(*spec, n, ring)?,
        Expr::Named(named) => named_series(*named, n, ring)?,
        Expr::Add(a, b) => eval_in(a, n, ring)?.add(&eval_in(b, n, ring)?)?,
        Expr::Sub(a, b) => eval_in(a, n, ring)?.sub(&eval_in(b, n, ring)?)?,
        Expr::Mul(a, b) => eval_in(a, n, ring)?.mul(&eval_in(b, n, ring)?)?,
        Expr::Div(a, b) => eval_in(a, n, ring)?.div(&eval_in(b, n, ring)?)?,
        Expr::Pow(a, k) => eval_in(a, n, ring)?.pow(*k)?,
        Expr::Neg(a) => eval_in(a, n, ring)?.neg(),
        Expr::Subst(a, k) => {
            if *k == 0 {
                return Err(SeriesError::InvalidSubstitution(0).into());
            }
            eval_in(a, n / *k as usize, ring)?.substitute_power_into(*k, n)?
        }
        Expr::Part(a, step, r) => {
            let inner = *step as usize * n + *r as usize;
            eval_in(a, inner, ring)?.extract_progression(*step, *r)?
        }
    })
}

fn named_series(named: NamedSeries, n: usize, ring: Ring) -> Result<TruncatedSeries, EvalError> {
    Ok(match named {
        NamedSeries::Pd => qfactory::pd_series(n, ring)?,
        NamedSeries::Pdk(k) => qfactory::pdk_series(k, n, ring)?,
        NamedSeries::G => qfactory::g_series(n, ring)?,
        NamedSeries::H => qfactory::h_series(n, ring)?,
        NamedSeries::SqPos => qfactory::square_sum(n, ring, |v| v >= 1),
        NamedSeries::SqNot3 => qfactory::square_sum(n, ring, |v| v % 3 != 0),
        NamedSeries::SqOdd => qfactory::square_sum(n, ring, |v| v % 2 == 1),
        NamedSeries::OddMult => TruncatedSeries::new(odd_multiplicity_table(n), n, ring.modulus())?,
    })
}
