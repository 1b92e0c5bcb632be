//! Gaussian moments, Hermite polynomials, quadrature and sampling.

pub mod moments;
pub mod quadrature;
pub mod sampler;

pub use moments::{gaussian_expectation, gaussian_moment, hermite, pushforward_moment, PushforwardMoments};
pub use quadrature::{gauss_hermite_rule, oscillation_adapted_rule, QuadratureRule};
pub use sampler::{chunked_estimate, GaussianSampler, SampleMoments};
