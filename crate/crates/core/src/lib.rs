//! Exact derivation, certification and verification of polynomial-coefficient
//! Stein operators for `W = P(Z)`, `Z` standard Gaussian.
//!
//! Everything symbolic is exact over the rationals. An operator
//! `A f(x) = sum_m p_m(x) f^(m)(x)` is derived by expanding `E[A f(W)]` into
//! the terms `E[Z^i f^(j)(W)]` and asking for it to lie in the span of the
//! Gaussian integration-by-parts identities. The multipliers form a
//! certificate that can be replayed exactly. Numerical checks (quadrature,
//! Monte Carlo, densities) are kept separate from the derivation path.

// Negated float comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exact;
pub mod gaussian;
pub mod ibp;
pub mod operator;
pub mod verify;

pub use error::{Error, Result};
pub use exact::{Polynomial, Rational};
pub use operator::DiffOperator;
