//! Integer expressions for the claim registry: parameters, residues, index
//! filters and counter predicates.
//!
//! Booleans are `0`/`1`; `or`, `and`, `not` are accepted for `||`, `&&`, `!`.
//! All arithmetic is checked; `/` and `%` are Euclidean.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntExprError {
    #[error("{message} at position {position}")]
    Parse { position: usize, message: String },
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("unknown function '{0}'")]
    UnknownFunction(String),
    #[error("'{name}' takes {expected} arguments, got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("division by zero")]
    DivisionByZero,
    #[error("integer overflow")]
    Overflow,
    #[error("{0}")]
    Domain(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "||",
            BinOp::And => "&&",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntExpr {
    Num(i64),
    Var(String),
    Call(String, Vec<IntExpr>),
    Neg(Box<IntExpr>),
    Not(Box<IntExpr>),
    Binary(BinOp, Box<IntExpr>, Box<IntExpr>),
}

/// Variable and function bindings for evaluation.
pub trait Env {
    fn var(&self, name: &str) -> Option<i64>;
    fn call(&self, name: &str, args: &[i64]) -> Result<i64, IntExprError>;
}

/// An environment with only variables.
impl Env for [(String, i64)] {
    fn var(&self, name: &str) -> Option<i64> {
        self.iter().rev().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    fn call(&self, name: &str, _args: &[i64]) -> Result<i64, IntExprError> {
        Err(IntExprError::UnknownFunction(name.to_string()))
    }
}

pub fn checked_pow(base: i64, e: i64) -> Result<i64, IntExprError> {
    if e < 0 {
        return Err(IntExprError::Domain(format!("negative exponent {e}")));
    }
    let e = u32::try_from(e).map_err(|_| IntExprError::Overflow)?;
    base.checked_pow(e).ok_or(IntExprError::Overflow)
}

impl IntExpr {
    pub fn eval<E: Env + ?Sized>(&self, env: &E) -> Result<i64, IntExprError> {
        match self {
            IntExpr::Num(v) => Ok(*v),
            IntExpr::Var(name) => env
                .var(name)
                .ok_or_else(|| IntExprError::UnknownVariable(name.clone())),
            IntExpr::Call(name, args) => {
                let values = args
                    .iter()
                    .map(|a| a.eval(env))
                    .collect::<Result<Vec<_>, _>>()?;
                env.call(name, &values)
            }
            IntExpr::Neg(a) => a.eval(env)?.checked_neg().ok_or(IntExprError::Overflow),
            IntExpr::Not(a) => Ok((a.eval(env)? == 0) as i64),
            IntExpr::Binary(op, a, b) => {
                // Short-circuit so filters like `n >= 1 && count(n) ...` stay in domain.
                match op {
                    BinOp::And => {
                        return Ok((a.eval(env)? != 0 && b.eval(env)? != 0) as i64);
                    }
                    BinOp::Or => {
                        return Ok((a.eval(env)? != 0 || b.eval(env)? != 0) as i64);
                    }
                    _ => {}
                }
                let (x, y) = (a.eval(env)?, b.eval(env)?);
                let of = IntExprError::Overflow;
                Ok(match op {
                    BinOp::Add => x.checked_add(y).ok_or(of)?,
                    BinOp::Sub => x.checked_sub(y).ok_or(of)?,
                    BinOp::Mul => x.checked_mul(y).ok_or(of)?,
                    BinOp::Div => {
                        if y == 0 {
                            return Err(IntExprError::DivisionByZero);
                        }
                        x.checked_div_euclid(y).ok_or(of)?
                    }
                    BinOp::Rem => {
                        if y == 0 {
                            return Err(IntExprError::DivisionByZero);
                        }
                        x.checked_rem_euclid(y).ok_or(of)?
                    }
                    BinOp::Pow => checked_pow(x, y)?,
                    BinOp::Eq => (x == y) as i64,
                    BinOp::Ne => (x != y) as i64,
                    BinOp::Lt => (x < y) as i64,
                    BinOp::Le => (x <= y) as i64,
                    BinOp::Gt => (x > y) as i64,
                    BinOp::Ge => (x >= y) as i64,
                    BinOp::And | BinOp::Or => unreachable!("handled above"),
                })
            }
        }
    }

    /// Free variables.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            IntExpr::Num(_) => {}
            IntExpr::Var(v) => {
                out.insert(v.clone());
            }
            IntExpr::Call(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            IntExpr::Neg(a) | IntExpr::Not(a) => a.collect_vars(out),
            IntExpr::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Names of all functions called.
    pub fn calls(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_calls(&mut out);
        out
    }

    fn collect_calls(&self, out: &mut BTreeSet<String>) {
        match self {
            IntExpr::Num(_) | IntExpr::Var(_) => {}
            IntExpr::Call(name, args) => {
                out.insert(name.clone());
                args.iter().for_each(|a| a.collect_calls(out));
            }
            IntExpr::Neg(a) | IntExpr::Not(a) => a.collect_calls(out),
            IntExpr::Binary(_, a, b) => {
                a.collect_calls(out);
                b.collect_calls(out);
            }
        }
    }
}

impl fmt::Display for IntExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntExpr::Num(v) => write!(f, "{v}"),
            IntExpr::Var(v) => f.write_str(v),
            IntExpr::Call(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            IntExpr::Neg(a) => write!(f, "-({a})"),
            IntExpr::Not(a) => write!(f, "!({a})"),
            IntExpr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(i64),
    Ident(String),
    Op(&'static str),
    End,
}

const OPS: [&str; 18] = [
    "||", "&&", "==", "!=", "<=", ">=", "<", ">", "+", "-", "*", "/", "%", "^", "!", "(", ")", ",",
];

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, IntExprError> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let v = text[start..i].parse().map_err(|_| IntExprError::Parse {
                position: start,
                message: format!("malformed integer '{}'", &text[start..i]),
            })?;
            out.push((start, Tok::Num(v)));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            // Word forms keep `|` free for the registry's field separator.
            let tok = match word {
                "or" => Tok::Op("||"),
                "and" => Tok::Op("&&"),
                "not" => Tok::Op("!"),
                _ => Tok::Ident(word.to_string()),
            };
            out.push((start, tok));
            continue;
        }
        match OPS.iter().find(|op| text[i..].starts_with(**op)) {
            Some(op) => {
                out.push((i, Tok::Op(op)));
                i += op.len();
            }
            None => {
                return Err(IntExprError::Parse {
                    position: i,
                    message: format!(
                        "unexpected character '{}'",
                        text[i..].chars().next().unwrap_or('?')
                    ),
                })
            }
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> IntExprError {
        IntExprError::Parse {
            position: self.toks[self.pos].0,
            message: message.into(),
        }
    }

    fn eat(&mut self, op: &str) -> bool {
        if matches!(self.peek(), Tok::Op(o) if *o == op) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn binary_level(
        &mut self,
        ops: &[(&str, BinOp)],
        next: fn(&mut Parser) -> Result<IntExpr, IntExprError>,
    ) -> Result<IntExpr, IntExprError> {
        let mut acc = next(self)?;
        'outer: loop {
            for (sym, op) in ops {
                if self.eat(sym) {
                    acc = IntExpr::Binary(*op, Box::new(acc), Box::new(next(self)?));
                    continue 'outer;
                }
            }
            return Ok(acc);
        }
    }

    fn or(&mut self) -> Result<IntExpr, IntExprError> {
        self.binary_level(&[("||", BinOp::Or)], Parser::and)
    }

    fn and(&mut self) -> Result<IntExpr, IntExprError> {
        self.binary_level(&[("&&", BinOp::And)], Parser::cmp)
    }

    fn cmp(&mut self) -> Result<IntExpr, IntExprError> {
        self.binary_level(
            &[
                ("==", BinOp::Eq),
                ("!=", BinOp::Ne),
                ("<=", BinOp::Le),
                (">=", BinOp::Ge),
                ("<", BinOp::Lt),
                (">", BinOp::Gt),
            ],
            Parser::sum,
        )
    }

    fn sum(&mut self) -> Result<IntExpr, IntExprError> {
        self.binary_level(&[("+", BinOp::Add), ("-", BinOp::Sub)], Parser::product)
    }

    fn product(&mut self) -> Result<IntExpr, IntExprError> {
        self.binary_level(
            &[("*", BinOp::Mul), ("/", BinOp::Div), ("%", BinOp::Rem)],
            Parser::unary,
        )
    }

    fn unary(&mut self) -> Result<IntExpr, IntExprError> {
        if self.eat("-") {
            Ok(IntExpr::Neg(Box::new(self.unary()?)))
        } else if self.eat("!") {
            Ok(IntExpr::Not(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<IntExpr, IntExprError> {
        let base = self.primary()?;
        if self.eat("^") {
            let e = self.unary()?;
            Ok(IntExpr::Binary(BinOp::Pow, Box::new(base), Box::new(e)))
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<IntExpr, IntExprError> {
        match self.bump() {
            Tok::Num(v) => Ok(IntExpr::Num(v)),
            Tok::Ident(name) => {
                if self.eat("(") {
                    let mut args = Vec::new();
                    if !self.eat(")") {
                        loop {
                            args.push(self.or()?);
                            if self.eat(")") {
                                break;
                            }
                            if !self.eat(",") {
                                return Err(self.error("expected ',' or ')'"));
                            }
                        }
                    }
                    Ok(IntExpr::Call(name, args))
                } else {
                    Ok(IntExpr::Var(name))
                }
            }
            Tok::Op("(") => {
                let e = self.or()?;
                if !self.eat(")") {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.error("expected an integer expression"))
            }
        }
    }
}

fn parser(text: &str) -> Result<Parser, IntExprError> {
    Ok(Parser {
        toks: lex(text)?,
        pos: 0,
    })
}

pub fn parse_int_expr(text: &str) -> Result<IntExpr, IntExprError> {
    let mut p = parser(text)?;
    let e = p.or()?;
    if *p.peek() != Tok::End {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

/// A parameter binding: `VAR in LO..HI` (inclusive), `VAR in {A, B, ...}`,
/// or a boolean filter over already-bound parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamSpec {
    Range {
        var: String,
        lo: IntExpr,
        hi: IntExpr,
    },
    Set {
        var: String,
        values: Vec<IntExpr>,
    },
    Filter(IntExpr),
}

impl fmt::Display for ParamSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamSpec::Range { var, lo, hi } => write!(f, "{var} in {lo}..{hi}"),
            ParamSpec::Set { var, values } => {
                write!(f, "{var} in {{")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("}")
            }
            ParamSpec::Filter(e) => write!(f, "{e}"),
        }
    }
}

pub fn parse_param(text: &str) -> Result<ParamSpec, IntExprError> {
    let words: Vec<&str> = text.trim().splitn(3, char::is_whitespace).collect();
    if words.len() == 3 && words[1] == "in" {
        let var = words[0].to_string();
        let rest = words[2].trim();
        if let Some(inner) = rest.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
            let values = inner
                .split(',')
                .map(parse_int_expr)
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(ParamSpec::Set { var, values });
        }
        let (lo, hi) = rest.split_once("..").ok_or_else(|| IntExprError::Parse {
            position: 0,
            message: format!("expected LO..HI or {{...}} in '{text}'"),
        })?;
        return Ok(ParamSpec::Range {
            var,
            lo: parse_int_expr(lo)?,
            hi: parse_int_expr(hi)?,
        });
    }
    Ok(ParamSpec::Filter(parse_int_expr(text)?))
}

/// All assignments satisfying `specs` in order; later specs may refer to
/// variables bound by earlier ones. `eval` evaluates an expression under a
/// partial assignment, so callers choose which functions are available.
pub fn expand_params<F>(
    specs: &[ParamSpec],
    eval: F,
) -> Result<Vec<Vec<(String, i64)>>, IntExprError>
where
    F: Fn(&IntExpr, &[(String, i64)]) -> Result<i64, IntExprError>,
{
    let mut out = vec![Vec::new()];
    for spec in specs {
        let mut next = Vec::new();
        for binding in out {
            match spec {
                ParamSpec::Range { var, lo, hi } => {
                    let (lo, hi) = (eval(lo, &binding)?, eval(hi, &binding)?);
                    for v in lo..=hi {
                        let mut b = binding.clone();
                        b.push((var.clone(), v));
                        next.push(b);
                    }
                }
                ParamSpec::Set { var, values } => {
                    for e in values {
                        let mut b = binding.clone();
                        b.push((var.clone(), eval(e, &binding)?));
                        next.push(b);
                    }
                }
                ParamSpec::Filter(e) => {
                    if eval(e, &binding)? != 0 {
                        next.push(binding);
                    }
                }
            }
        }
        out = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(text: &str, vars: &[(&str, i64)]) -> Result<i64, IntExprError> {
        let env: Vec<(String, i64)> = vars.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        parse_int_expr(text)?.eval(env.as_slice())
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_eq!(eval("1 + 2 * 3", &[]), Ok(7));
        assert_eq!(eval("2^3^2", &[]), Ok(512));
        assert_eq!(eval("-2^2", &[]), Ok(-4));
        assert_eq!(eval("3^(2*k+1)", &[("k", 1)]), Ok(27));
        assert_eq!(eval("-7 % 3", &[]), Ok(2));
        assert_eq!(eval("-7 / 2", &[]), Ok(-4));
        assert_eq!(eval("n >= 1 && n % 6 != 0", &[("n", 12)]), Ok(0));
        assert_eq!(eval("n >= 1 && n % 6 != 0", &[("n", 5)]), Ok(1));
        assert_eq!(eval("!(1 == 2) || x", &[]), Ok(1));
        assert_eq!(
            eval("n == 0 or issq and 0", &[("n", 0), ("issq", 1)]),
            Ok(1)
        );
        assert_eq!(eval("not 1", &[]), Ok(0));
    }

    #[test]
    fn evaluation_errors() {
        assert_eq!(eval("1 / 0", &[]), Err(IntExprError::DivisionByZero));
        assert_eq!(eval("2^70", &[]), Err(IntExprError::Overflow));
        assert_eq!(
            eval("y", &[]),
            Err(IntExprError::UnknownVariable("y".into()))
        );
        assert!(matches!(
            eval("f(1)", &[]),
            Err(IntExprError::UnknownFunction(_))
        ));
        assert!(matches!(eval("1 +", &[]), Err(IntExprError::Parse { .. })));
        assert!(matches!(
            eval("1 $ 2", &[]),
            Err(IntExprError::Parse { position: 2, .. })
        ));
    }

    #[test]
    fn param_expansion() {
        let specs = ["l in 3..5", "j in 3..l", "s in {2, 3}", "s < 2^(j-1)"]
            .iter()
            .map(|t| parse_param(t).unwrap())
            .collect::<Vec<_>>();
        let all = expand_params(&specs, |e, b| e.eval(b)).unwrap();
        // (l, j) pairs: 6; two values of s each, all below 2^(j-1) >= 4
        assert_eq!(all.len(), 12);
        assert_eq!(
            all[0],
            vec![("l".into(), 3), ("j".into(), 3), ("s".into(), 2)]
        );
    }

    #[test]
    fn display_reparses() {
        for t in [
            "1 + 2 * n",
            "count_a(n, l) % 2",
            "!(n % 6 == 0) && n >= 1",
            "-3^k",
        ] {
            let e = parse_int_expr(t).unwrap();
            assert_eq!(parse_int_expr(&e.to_string()).unwrap(), e);
        }
    }
}
