//! Strategies and properties shared by the proptest suite and the acceptance
//! runner.
#![allow(dead_code)]

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use qpd_core::counters::{is_form_4a_8b1, psi_involution, quadratic_residues, Rational};
use qpd_core::identities::{evaluate, parse_expression, Expr, NamedSeries};
use qpd_core::qfactory::{fk, g_series, ThetaSpec};
use qpd_core::{Ring, TruncatedSeries};

pub type PropResult = Result<(), TestCaseError>;

fn series_in(coeffs: &[i64], modulus: Option<u64>) -> TruncatedSeries {
    TruncatedSeries::from_i64(coeffs, coeffs.len() - 1, modulus).unwrap()
}

/// Three coefficient vectors of one common length `1..=24`.
pub fn coeff_triple() -> impl Strategy<Value = (Vec<i64>, Vec<i64>, Vec<i64>)> {
    (1usize..=24).prop_flat_map(|len| {
        let v = || prop::collection::vec(-40i64..40, len);
        (v(), v(), v())
    })
}

pub fn ring_axioms(a: &[i64], b: &[i64], c: &[i64], modulus: Option<u64>) -> PropResult {
    let (a, b, c) = (
        series_in(a, modulus),
        series_in(b, modulus),
        series_in(c, modulus),
    );
    let n = a.precision();
    let ring = a.ring();
    let zero = TruncatedSeries::zero(n, ring);
    let one = TruncatedSeries::one(n, ring);
    let add = |x: &TruncatedSeries, y: &TruncatedSeries| x.add(y).unwrap();
    let mul = |x: &TruncatedSeries, y: &TruncatedSeries| x.mul(y).unwrap();
    prop_assert_eq!(add(&add(&a, &b), &c), add(&a, &add(&b, &c)));
    prop_assert_eq!(add(&a, &b), add(&b, &a));
    prop_assert_eq!(mul(&mul(&a, &b), &c), mul(&a, &mul(&b, &c)));
    prop_assert_eq!(mul(&a, &b), mul(&b, &a));
    prop_assert_eq!(mul(&a, &add(&b, &c)), add(&mul(&a, &b), &mul(&a, &c)));
    prop_assert_eq!(add(&a, &zero), a.clone());
    prop_assert_eq!(mul(&a, &one), a.clone());
    prop_assert_eq!(a.sub(&a).unwrap(), zero);
    Ok(())
}

/// `a * a^{-1} = 1` once the constant term is made a unit.
pub fn inverse_property(a: &[i64], modulus: Option<u64>) -> PropResult {
    let mut a = a.to_vec();
    a[0] = match modulus {
        Some(m) => 1 + a[0].rem_euclid(2) * (m as i64 - 2),
        None => 1 - 2 * a[0].rem_euclid(2),
    };
    let s = series_in(&a, modulus);
    let one = TruncatedSeries::one(s.precision(), s.ring());
    prop_assert_eq!(s.mul(&s.invert().unwrap()).unwrap(), one.clone());
    prop_assert_eq!(one.div(&s).unwrap(), s.invert().unwrap());
    Ok(())
}

/// `(a b)(q^k) = a(q^k) b(q^k)`.
pub fn substitution_morphism(a: &[i64], b: &[i64], k: u64, modulus: Option<u64>) -> PropResult {
    let (a, b) = (series_in(a, modulus), series_in(b, modulus));
    let lhs = a.mul(&b).unwrap().substitute_power(k).unwrap();
    let rhs = a
        .substitute_power(k)
        .unwrap()
        .mul(&b.substitute_power(k).unwrap())
        .unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

/// Reassembling all `A`-progressions gives back the series.
pub fn progression_interleave(a: &[i64], step: u64) -> PropResult {
    let s = series_in(a, None);
    let n = s.precision();
    let mut acc = TruncatedSeries::zero(n, Ring::Exact);
    for r in 0..step.min(n as u64 + 1) {
        let part = s.extract_progression(step, r).unwrap();
        let spread = part.substitute_power_into(step, n - r as usize).unwrap();
        let padded = TruncatedSeries::new(
            spread
                .coeffs()
                .into_iter()
                .chain(std::iter::repeat_n(BigInt::from(0), r as usize))
                .collect(),
            n,
            None,
        )
        .unwrap();
        acc = acc.add(&padded.shift(r as usize)).unwrap();
    }
    prop_assert_eq!(acc, s);
    Ok(())
}

/// `f_k(q)^p ≡ f_{pk}(q)` and `g(q)^p ≡ g(q^p)` modulo a prime `p`.
pub fn frobenius(p: u64, k: u64, precision: usize) -> PropResult {
    let ring = Ring::Mod(p);
    let lhs = fk(k, precision, ring).unwrap().pow(p as i64).unwrap();
    prop_assert_eq!(lhs, fk(p * k, precision, ring).unwrap());
    let g = g_series(precision, ring).unwrap();
    prop_assert_eq!(g.pow(p as i64).unwrap(), g.substitute_power(p).unwrap());
    Ok(())
}

/// `Ψ` is an involution and preserves `a^2 + 2b^2`.
pub fn psi_property(a: i64, b: i64) -> PropResult {
    let (a, b) = (Rational::from_integer(a), Rational::from_integer(b));
    let (c, d) = psi_involution(a, b);
    prop_assert_eq!(psi_involution(c, d), (a, b));
    prop_assert_eq!(c * c + d * d * 2, a * a + b * b * 2);
    Ok(())
}

/// Squares modulo `2^{j-1}` are `0` and the `s = 4^a (8b + 1)` below it.
pub fn residue_sets(j: u32) -> PropResult {
    let m = 1u64 << (j - 1);
    let squares = quadratic_residues(m).unwrap();
    let form: std::collections::BTreeSet<u64> =
        (0..m).filter(|&s| s == 0 || is_form_4a_8b1(s)).collect();
    prop_assert_eq!(squares, form);
    Ok(())
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0u64..7).prop_map(Expr::Int),
        (0u64..5).prop_map(Expr::QPow),
        (1u64..7).prop_map(Expr::Eta),
        (1u64..5, 1u64..5).prop_map(|(a, b)| Expr::Poch(a, b)),
        Just(Expr::Theta(ThetaSpec::Phi)),
        Just(Expr::Theta(ThetaSpec::Psi)),
        (1u64..5, 1u64..5, prop::bool::ANY, prop::bool::ANY).prop_map(|(x, y, s1, s2)| {
            Expr::Theta(ThetaSpec::General {
                x,
                y,
                s1: if s1 { 1 } else { -1 },
                s2: if s2 { 1 } else { -1 },
            })
        }),
        prop_oneof![
            Just(NamedSeries::Pd),
            (2u64..6).prop_map(NamedSeries::Pdk),
            Just(NamedSeries::G),
            Just(NamedSeries::H),
            Just(NamedSeries::SqPos),
            Just(NamedSeries::SqNot3),
            Just(NamedSeries::SqOdd),
            Just(NamedSeries::OddMult),
        ]
        .prop_map(Expr::Named),
    ]
}

/// Arbitrary syntax trees, including division, powers and negation.
pub fn any_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a / b),
            (inner.clone(), -3i64..4).prop_map(|(a, e)| a.pow(e)),
            inner.clone().prop_map(|a| -a),
            (inner.clone(), 1u64..4).prop_map(|(a, k)| a.subst(k)),
            (inner, 1u64..4, 0u64..4).prop_map(|(a, s, r)| a.part(s, r % s)),
        ]
    })
}

/// Trees that always evaluate: no division and no negative powers.
pub fn ring_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            inner.prop_map(|a| -a),
        ]
    })
}

pub fn parser_round_trip(e: &Expr) -> PropResult {
    let text = e.to_string();
    let back =
        parse_expression(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
    prop_assert_eq!(&back, e, "text: {}", text);
    prop_assert_eq!(back.to_string(), text);
    Ok(())
}

pub fn evaluation_homomorphism(a: &Expr, b: &Expr, modulus: Option<u64>) -> PropResult {
    let n = 25;
    let ea = evaluate(a, n, modulus).unwrap();
    let eb = evaluate(b, n, modulus).unwrap();
    let prod = evaluate(&(a.clone() * b.clone()), n, modulus).unwrap();
    let sum = evaluate(&(a.clone() + b.clone()), n, modulus).unwrap();
    prop_assert_eq!(prod, ea.mul(&eb).unwrap());
    prop_assert_eq!(sum, ea.add(&eb).unwrap());
    Ok(())
}
