//! Exact multivariate polynomials over QQ, monomial orders, and the expression parser.

mod order;
mod parser;
mod polynomial;
mod varset;

pub use order::{BlockKind, Monomial, MonomialOrder};
pub use parser::parse_poly;
pub use polynomial::{poly_arith, ArithOp, Coeff, Polynomial};
pub use varset::{check_same, Ring, VarSet};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("unknown variable {name:?} at offset {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("syntax error at offset {pos}: {msg}")]
    SyntaxError { pos: usize, msg: String },
    #[error("exponent at offset {pos} is not a nonnegative integer")]
    NonIntegerExponent { pos: usize },
    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch { left: String, right: String },
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("invalid variable set: {0}")]
    InvalidVarSet(String),
}
