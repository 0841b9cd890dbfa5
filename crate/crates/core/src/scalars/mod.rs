//! Exact scalar arithmetic: rationals, cyclotomic field elements, and sparse
//! multivariate polynomials over them.
//!
//! All values are kept in canonical form so that structural equality is
//! mathematical equality: rationals are gcd-reduced with positive denominator,
//! cyclotomic elements are reduced modulo the cyclotomic polynomial of their
//! order and demoted to order 1 whenever they are in fact rational, and sparse
//! polynomials drop zero terms and order their monomials graded-lexicographically.

mod cyclotomic;
mod rational;
mod sparse;

pub use cyclotomic::{cyclotomic_polynomial, CycScalar};
pub use rational::Rational;
pub use sparse::{Monomial, SparsePoly};

use thiserror::Error;

/// Errors raised by exact scalar arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("order {from} does not divide order {to}, no embedding exists")]
    NotASubfield { from: u64, to: u64 },
    #[error("cannot parse {0:?} as an exact scalar")]
    Parse(String),
}
