//! A small expression language over eta quotients, Pochhammer symbols and
//! theta functions, and a ledger of identities checked to finite precision.

mod eval;
mod expr;
mod ledger;
mod parser;

pub use eval::{evaluate, EvalError};
pub use expr::{Expr, NamedSeries};
pub use ledger::{
    builtin_ledger, builtin_ledger_text, check_identity, check_ledger, load_ledger, parse_ledger,
    IdentityClaim, IdentityError, IdentityReport, IdentityStatus, LedgerError, Mismatch,
};
pub use parser::{parse_expression, ParseError, ParseErrorKind};
