//! Independent checks of an operator: exact monomial annihilation,
//! quadrature on smooth test functions, Monte Carlo, and density-based
//! checks for the non-central chi-square.

pub mod monte_carlo;
pub mod noncentral;
pub mod precise;
pub mod quadrature;
pub mod report;
mod suite;
pub mod symbolic;
pub mod testfn;

pub use monte_carlo::{verify_monte_carlo, SampledLaw};
pub use noncentral::{bessel_i, noncentral_pdf, verify_noncentral_operator};
pub use quadrature::{target_expectation, verify_quadrature, QuadratureConfig, RuleKind};
pub use report::{TestResult, VerificationReport};
pub use suite::{mutation_control, verify_entry, verify_pushforward, Method, VerifyOptions};
pub use symbolic::{verify_symbolic, verify_symbolic_moments};
pub use testfn::TestFunction;
