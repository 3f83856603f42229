use std::fmt;

use crate::qfactory::ThetaSpec;

/// Series that have no short product or theta form in the grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedSeries {
    /// `pd(q) = f_6 / (f_1 f_2 f_3)`
    Pd,
    /// `pd_k(q)`, the generating function of `PD_k(n)`.
    Pdk(u64),
    /// `g(q) = 1 / pd(q)`
    G,
    /// `h(q) = f_1^2 / f_2`
    H,
    /// `sum_{k >= 1} q^{k^2}`
    SqPos,
    /// `sum_{k >= 1, 3 does not divide k} q^{k^2}`
    SqNot3,
    /// `sum_{n >= 1 odd} q^{n^2}`
    SqOdd,
    /// `sum_n b_n q^n`, partitions with every multiplicity odd.
    OddMult,
}

impl NamedSeries {
    pub(crate) fn from_ident(name: &str) -> Option<NamedSeries> {
        Some(match name {
            "pd" => NamedSeries::Pd,
            "g" => NamedSeries::G,
            "h" => NamedSeries::H,
            "sqpos" => NamedSeries::SqPos,
            "sqnot3" => NamedSeries::SqNot3,
            "sqodd" => NamedSeries::SqOdd,
            "oddmult" => NamedSeries::OddMult,
            _ => return None,
        })
    }
}

impl fmt::Display for NamedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedSeries::Pd => f.write_str("pd"),
            NamedSeries::Pdk(k) => write!(f, "pd_{k}"),
            NamedSeries::G => f.write_str("g"),
            NamedSeries::H => f.write_str("h"),
            NamedSeries::SqPos => f.write_str("sqpos"),
            NamedSeries::SqNot3 => f.write_str("sqnot3"),
            NamedSeries::SqOdd => f.write_str("sqodd"),
            NamedSeries::OddMult => f.write_str("oddmult"),
        }
    }
}

/// Syntax tree of a series expression.
///
/// Negative integer constants are `Neg(Int(..))`; the printer emits the
/// canonical text and `parse_expression` reads it back to the same tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(u64),
    /// `q^j`
    QPow(u64),
    /// `f_k = (q^k; q^k)_inf`
    Eta(u64),
    /// `(q^a; q^b)_inf`
    Poch(u64, u64),
    Theta(ThetaSpec),
    Named(NamedSeries),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Neg(Box<Expr>),
    /// `q -> q^k`
    Subst(Box<Expr>, u64),
    /// `sum_n c(A n + r) q^n` of the child series.
    Part(Box<Expr>, u64, u64),
}

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => PREC_ADD,
            Expr::Mul(..) | Expr::Div(..) => PREC_MUL,
            Expr::Neg(..) => PREC_NEG,
            Expr::Pow(..) | Expr::QPow(..) => PREC_POW,
            _ => PREC_ATOM,
        }
    }

    pub fn pow(self, e: i64) -> Expr {
        Expr::Pow(Box::new(self), e)
    }

    pub fn subst(self, k: u64) -> Expr {
        Expr::Subst(Box::new(self), k)
    }

    pub fn part(self, step: u64, r: u64) -> Expr {
        Expr::Part(Box::new(self), step, r)
    }

    /// Largest `k` in any `f_k`, `P(a, b)` step, theta exponent or substitution;
    /// a rough measure of how far apart the nonzero terms of the pieces are.
    pub fn max_scale(&self) -> u64 {
        match self {
            Expr::Int(_) | Expr::Named(_) => 1,
            Expr::QPow(j) => *j,
            Expr::Eta(k) => *k,
            Expr::Poch(a, b) => (*a).max(*b),
            Expr::Theta(ThetaSpec::General { x, y, .. }) => x + y,
            Expr::Theta(_) => 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_scale().max(b.max_scale())
            }
            Expr::Pow(a, _) | Expr::Neg(a) => a.max_scale(),
            Expr::Subst(a, k) => a.max_scale() * k,
            Expr::Part(a, _, _) => a.max_scale(),
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

fn write_binary(f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr, prec: u8) -> fmt::Result {
    write_child(f, a, a.precedence() < prec)?;
    f.write_str(op)?;
    write_child(f, b, b.precedence() <= prec)
}

fn write_sign(f: &mut fmt::Formatter<'_>, s: i8) -> fmt::Result {
    if s < 0 {
        f.write_str("-1")
    } else {
        f.write_str("1")
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl std::ops::$trait for Expr {
            type Output = Expr;

            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(self), Box::new(rhs))
            }
        }
    };
}

binary_op!(Add, add, Add);
binary_op!(Sub, sub, Sub);
binary_op!(Mul, mul, Mul);
binary_op!(Div, div, Div);

impl std::ops::Neg for Expr {
    type Output = Expr;

    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(v) => write!(f, "{v}"),
            Expr::QPow(j) => write!(f, "q^{j}"),
            Expr::Eta(k) => write!(f, "f{k}"),
            Expr::Poch(a, b) => write!(f, "P({a},{b})"),
            Expr::Theta(ThetaSpec::Phi) => f.write_str("phi"),
            Expr::Theta(ThetaSpec::Psi) => f.write_str("psi"),
            Expr::Theta(ThetaSpec::General { x, y, s1, s2 }) => {
                write!(f, "theta({x},{y},")?;
                write_sign(f, *s1)?;
                f.write_str(",")?;
                write_sign(f, *s2)?;
                f.write_str(")")
            }
            Expr::Named(n) => write!(f, "{n}"),
            Expr::Add(a, b) => write_binary(f, a, " + ", b, PREC_ADD),
            Expr::Sub(a, b) => write_binary(f, a, " - ", b, PREC_ADD),
            Expr::Mul(a, b) => write_binary(f, a, "*", b, PREC_MUL),
            Expr::Div(a, b) => write_binary(f, a, "/", b, PREC_MUL),
            Expr::Pow(a, e) => {
                write_child(f, a, a.precedence() < PREC_ATOM)?;
                write!(f, "^{e}")
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, a.precedence() < PREC_NEG)
            }
            Expr::Subst(a, k) => write!(f, "subst({a}, {k})"),
            Expr::Part(a, step, r) => write!(f, "part({a}, {step}, {r})"),
        }
    }
}
