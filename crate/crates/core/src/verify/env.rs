//! Function bindings for registry expressions.

use std::cell::RefCell;
use std::collections::HashMap;

use num_integer::Roots;

use super::intexpr::{Env, IntExprError};
use crate::counters::{self, CounterError};
use crate::par::Parallelism;

/// Variables plus the pure helper functions `issq`, `isqrt`, `qr`, `form48`.
pub struct Bindings<'a>(pub &'a [(String, i64)]);

fn arity(name: &str, args: &[i64], expected: usize) -> Result<(), IntExprError> {
    if args.len() != expected {
        return Err(IntExprError::Arity {
            name: name.to_string(),
            expected,
            got: args.len(),
        });
    }
    Ok(())
}

fn nonneg(name: &str, v: i64) -> Result<u64, IntExprError> {
    u64::try_from(v)
        .map_err(|_| IntExprError::Domain(format!("{name} needs a nonnegative argument, got {v}")))
}

fn counter_error(e: CounterError) -> IntExprError {
    IntExprError::Domain(e.to_string())
}

fn pure_call(name: &str, args: &[i64]) -> Option<Result<i64, IntExprError>> {
    let run = || -> Result<i64, IntExprError> {
        match name {
            "issq" => {
                arity(name, args, 1)?;
                Ok((args[0] >= 0 && counters::is_square(args[0] as u64)) as i64)
            }
            "isqrt" => {
                arity(name, args, 1)?;
                Ok(nonneg(name, args[0])?.sqrt() as i64)
            }
            "qr" => {
                arity(name, args, 2)?;
                let m = nonneg(name, args[1])?;
                let set = counters::quadratic_residues(m).map_err(counter_error)?;
                Ok(set.contains(&(args[0].rem_euclid(m as i64) as u64)) as i64)
            }
            "form48" => {
                arity(name, args, 1)?;
                Ok(counters::is_form_4a_8b1(nonneg(name, args[0])?) as i64)
            }
            _ => Err(IntExprError::UnknownFunction(name.to_string())),
        }
    };
    match name {
        "issq" | "isqrt" | "qr" | "form48" => Some(run()),
        _ => None,
    }
}

impl Env for Bindings<'_> {
    fn var(&self, name: &str) -> Option<i64> {
        self.0.var(name)
    }

    fn call(&self, name: &str, args: &[i64]) -> Result<i64, IntExprError> {
        pure_call(name, args)
            .unwrap_or_else(|| Err(IntExprError::UnknownFunction(name.to_string())))
    }
}

/// Residue tables keyed by counter name and its extra arguments.
type TableCache = RefCell<HashMap<(String, Vec<i64>), Vec<u64>>>;

/// Counter functions whose values are reduced modulo a fixed modulus,
/// backed by tables grown on demand.
pub struct CounterEnv {
    vars: Vec<(String, i64)>,
    modulus: u64,
    hint: usize,
    tables: TableCache,
}

/// Counter names accepted in predicates.
pub const COUNTERS: [&str; 10] = [
    "count_a",
    "count_a_star",
    "count_c",
    "count_d",
    "count_e",
    "count_e_star",
    "count_r",
    "count_odd_form",
    "oddmult",
    "pd4",
];

fn level(name: &str, v: i64) -> Result<u32, IntExprError> {
    u32::try_from(v).map_err(|_| IntExprError::Domain(format!("{name}: invalid level {v}")))
}

impl CounterEnv {
    /// `hint` is the largest index expected; tables are built that far at once.
    pub fn new(vars: Vec<(String, i64)>, modulus: u64, hint: usize) -> Self {
        CounterEnv {
            vars,
            modulus,
            hint,
            tables: RefCell::new(HashMap::new()),
        }
    }

    pub fn set_var(&mut self, name: &str, value: i64) {
        match self.vars.iter_mut().find(|(k, _)| k == name) {
            Some(slot) => slot.1 = value,
            None => self.vars.push((name.to_string(), value)),
        }
    }

    fn build(&self, name: &str, extra: &[i64], size: usize) -> Result<Vec<u64>, IntExprError> {
        let m = self.modulus;
        let rep = |counter: Result<counters::RepresentationCounter, CounterError>| {
            counter
                .map(|c| {
                    c.table(size, Parallelism::Sequential)
                        .into_iter()
                        .map(|v| v % m)
                        .collect()
                })
                .map_err(counter_error)
        };
        match name {
            "count_a" => rep(counters::a_counter(level(name, extra[0])?)),
            "count_a_star" => rep(counters::a_star_counter(level(name, extra[0])?)),
            "count_e" => rep(counters::e_counter(level(name, extra[0])?)),
            "count_e_star" => rep(counters::e_star_counter(level(name, extra[0])?)),
            "count_c" => Ok(counters::count_c_table_mod(size, m)),
            "count_d" => Ok(counters::count_d_table(size)
                .into_iter()
                .map(|v| v % m)
                .collect()),
            "oddmult" => Ok(counters::odd_multiplicity_table_mod(size, m)),
            _ => unreachable!("not a table counter: {name}"),
        }
    }

    fn tabled(&self, name: &str, args: &[i64], arg_count: usize) -> Result<i64, IntExprError> {
        arity(name, args, arg_count)?;
        let n = nonneg(name, args[0])? as usize;
        let key = (name.to_string(), args[1..].to_vec());
        if let Some(t) = self.tables.borrow().get(&key) {
            if n < t.len() {
                return Ok(t[n] as i64);
            }
        }
        let size = n.max(self.hint);
        let table = self.build(name, &args[1..], size)?;
        let v = table[n];
        self.tables.borrow_mut().insert(key, table);
        Ok(v as i64)
    }
}

impl Env for CounterEnv {
    fn var(&self, name: &str) -> Option<i64> {
        self.vars.as_slice().var(name)
    }

    fn call(&self, name: &str, args: &[i64]) -> Result<i64, IntExprError> {
        if let Some(r) = pure_call(name, args) {
            return r;
        }
        let m = self.modulus;
        match name {
            "count_a" | "count_a_star" | "count_e" | "count_e_star" => self.tabled(name, args, 2),
            "count_c" | "count_d" | "oddmult" => self.tabled(name, args, 1),
            "count_r" => {
                arity(name, args, 1)?;
                let v = counters::count_r(nonneg(name, args[0])?).map_err(counter_error)?;
                Ok((v % m) as i64)
            }
            "count_odd_form" => {
                arity(name, args, 1)?;
                Ok((counters::count_odd_form(nonneg(name, args[0])?) % m) as i64)
            }
            "pd4" => {
                arity(name, args, 1)?;
                Ok(counters::pd4_closed_form(nonneg(name, args[0])?) as i64 % m as i64)
            }
            _ => Err(IntExprError::UnknownFunction(name.to_string())),
        }
    }
}
