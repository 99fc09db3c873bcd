//! Exact symbolic expressions over the rationals.
//!
//! [`Expr`] is an immutable, cheaply clonable tree. Constructors perform light
//! simplification (flattening, sorting, collecting like terms and powers).
//! [`canonicalize`] maps an expression to the unique reduced numerator /
//! denominator form over the ring generated by its variables and function
//! applications, and [`is_zero`] decides vanishing exactly on the rational
//! fragment and by validated sampling elsewhere.

mod canon;
mod eval;
mod expr;
mod gcd;
mod interval;
mod parse;
mod poly;
mod ratfun;
mod render;
mod zero;

pub use canon::{canonicalize, try_canonicalize, AtomTable, DivisionByZero};
pub use eval::{eval, eval_exact, eval_f64, Assignment, EvalError, Value};
pub use expr::{Expr, Func, Node};
pub use gcd::gcd;
pub use interval::Interval;
pub use parse::{parse, parse_with, ParseError, ParseOptions};
pub use poly::{Mono, Poly};
pub use ratfun::RatFun;
pub use zero::{formal_is_zero, is_zero, is_zero_with, Fragment, Verdict, Witness, ZeroTest};

use std::collections::BTreeMap;

/// Simultaneous substitution followed by canonicalization.
pub fn substitute(e: &Expr, bindings: &BTreeMap<String, Expr>) -> Expr {
    canonicalize(&e.subs(bindings))
}

/// Exact partial derivative in canonical form.
pub fn diff(e: &Expr, var: &str) -> Expr {
    canonicalize(&e.diff(var))
}
