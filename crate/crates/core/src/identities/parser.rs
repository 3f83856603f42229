use thiserror::Error;

use super::expr::{Expr, NamedSeries};
use crate::qfactory::ThetaSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character '{0}'")]
    Lexical(char),
    #[error("unknown atom '{0}'")]
    UnknownAtom(String),
    #[error("'{name}' takes {expected} arguments, got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("malformed integer '{0}'")]
    MalformedInteger(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
}

/// A parse failure at byte offset `position` of the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Ident(String),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(v) => format!("integer {v}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Sym(c) => format!("'{c}'"),
            Tok::End => "end of input".to_string(),
        }
    }
}

fn err(position: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { position, kind }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            match word.parse::<u64>() {
                Ok(v) => out.push((start, Tok::Int(v))),
                Err(_) => {
                    return Err(err(
                        start,
                        ParseErrorKind::MalformedInteger(word.to_string()),
                    ))
                }
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*/^(),".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            let ch = text[i..].chars().next().expect("non-empty remainder");
            return Err(err(i, ParseErrorKind::Lexical(ch)));
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

    fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.pos + ahead).min(self.toks.len() - 1);
        &self.toks[i].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        err(
            self.offset(),
            ParseErrorKind::Unexpected {
                expected: expected.to_string(),
                found: self.peek().describe(),
            },
        )
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                acc = acc / self.unary()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.primary()?;
        while self.eat('^') {
            let negative = self.eat('-');
            let at = self.offset();
            let v = match self.bump().1 {
                Tok::Int(v) => v,
                other => {
                    return Err(err(
                        at,
                        ParseErrorKind::Unexpected {
                            expected: "integer exponent".to_string(),
                            found: other.describe(),
                        },
                    ))
                }
            };
            let v = i64::try_from(v)
                .map_err(|_| err(at, ParseErrorKind::MalformedInteger(v.to_string())))?;
            acc = acc.pow(if negative { -v } else { v });
        }
        Ok(acc)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                self.atom(&name, at)
            }
            _ => Err(self.unexpected("expression")),
        }
    }

    fn atom(&mut self, name: &str, at: usize) -> Result<Expr, ParseError> {
        match name {
            "q" => {
                if *self.peek() == Tok::Sym('^') {
                    if let Tok::Int(j) = *self.peek_at(1) {
                        self.bump();
                        self.bump();
                        return Ok(Expr::QPow(j));
                    }
                }
                Ok(Expr::QPow(1))
            }
            "phi" => Ok(Expr::Theta(ThetaSpec::Phi)),
            "psi" => Ok(Expr::Theta(ThetaSpec::Psi)),
            "P" | "theta" | "subst" | "part" => self.call(name, at),
            _ => {
                if let Some(named) = NamedSeries::from_ident(name) {
                    return Ok(Expr::Named(named));
                }
                if let Some(k) = name.strip_prefix("pd_") {
                    let k = scale(k, at, 2)?;
                    return Ok(Expr::Named(NamedSeries::Pdk(k)));
                }
                if let Some(k) = name.strip_prefix('f') {
                    if !k.is_empty() && k.bytes().all(|b| b.is_ascii_digit()) {
                        return Ok(Expr::Eta(scale(k, at, 1)?));
                    }
                }
                Err(err(at, ParseErrorKind::UnknownAtom(name.to_string())))
            }
        }
    }

    fn call(&mut self, name: &str, at: usize) -> Result<Expr, ParseError> {
        self.expect('(')?;
        let mut args = Vec::new();
        if *self.peek() != Tok::Sym(')') {
            loop {
                let arg_at = self.offset();
                args.push((arg_at, self.expr()?));
                if !self.eat(',') {
                    break;
                }
            }
        }
        self.expect(')')?;
        let expected = match name {
            "P" => 2,
            "theta" => 4,
            "subst" => 2,
            _ => 3,
        };
        if args.len() != expected {
            return Err(err(
                at,
                ParseErrorKind::Arity {
                    name: name.to_string(),
                    expected,
                    got: args.len(),
                },
            ));
        }
        let int = |i: usize| int_arg(&args[i].1, args[i].0);
        let positive = |i: usize| -> Result<u64, ParseError> {
            let v = int(i)?;
            if v < 1 {
                return Err(err(
                    args[i].0,
                    ParseErrorKind::InvalidArgument(format!(
                        "{name} needs a positive integer, got {v}"
                    )),
                ));
            }
            Ok(v as u64)
        };
        match name {
            "P" => Ok(Expr::Poch(positive(0)?, positive(1)?)),
            "theta" => {
                let (x, y) = (positive(0)?, positive(1)?);
                let sign = |i: usize| -> Result<i8, ParseError> {
                    match int(i)? {
                        1 => Ok(1),
                        -1 => Ok(-1),
                        v => Err(err(
                            args[i].0,
                            ParseErrorKind::InvalidArgument(format!(
                                "theta sign must be 1 or -1, got {v}"
                            )),
                        )),
                    }
                };
                Ok(Expr::Theta(ThetaSpec::General {
                    x,
                    y,
                    s1: sign(2)?,
                    s2: sign(3)?,
                }))
            }
            "subst" => Ok(args[0].1.clone().subst(positive(1)?)),
            _ => {
                let step = positive(1)?;
                let r = int(2)?;
                if r < 0 || r as u64 >= step {
                    return Err(err(
                        args[2].0,
                        ParseErrorKind::InvalidArgument(format!("residue {r} outside 0..{step}")),
                    ));
                }
                Ok(args[0].1.clone().part(step, r as u64))
            }
        }
    }
}

fn scale(digits: &str, at: usize, min: u64) -> Result<u64, ParseError> {
    let v: u64 = digits
        .parse()
        .map_err(|_| err(at, ParseErrorKind::MalformedInteger(digits.to_string())))?;
    if v < min {
        return Err(err(
            at,
            ParseErrorKind::InvalidArgument(format!("scale must be at least {min}, got {v}")),
        ));
    }
    Ok(v)
}

fn int_arg(e: &Expr, at: usize) -> Result<i64, ParseError> {
    let bad = || {
        err(
            at,
            ParseErrorKind::Unexpected {
                expected: "integer argument".to_string(),
                found: e.to_string(),
            },
        )
    };
    match e {
        Expr::Int(v) => i64::try_from(*v).map_err(|_| bad()),
        Expr::Neg(inner) => match **inner {
            Expr::Int(v) => i64::try_from(v).map(|v| -v).map_err(|_| bad()),
            _ => Err(bad()),
        },
        _ => Err(bad()),
    }
}

/// Parses the series expression grammar:
///
/// ```text
/// expr    := term (('+' | '-') term)*
/// term    := unary (('*' | '/') unary)*
/// unary   := '-' unary | power
/// power   := primary ('^' '-'? INT)*
/// primary := INT | atom | '(' expr ')'
/// atom    := q | q^INT | f<k> | P(a,b) | phi | psi | theta(x,y,s1,s2)
///          | pd | pd_<k> | g | h | sqpos | sqnot3 | sqodd | oddmult
///          | subst(expr, k) | part(expr, A, r)
/// ```
pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("operator or end of input"));
    }
    Ok(e)
}
