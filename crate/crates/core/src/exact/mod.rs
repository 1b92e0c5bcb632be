//! Exact scalars, polynomials and linear algebra.

pub mod linalg;
mod poly;
mod rational;

pub(crate) use poly::{content_of, horner_f64};
pub use poly::{falling_factorial, Polynomial};
pub use rational::Rational;
