//! Combined verification runs over several methods.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Polynomial, Rational};
use crate::operator::{CatalogEntry, DiffOperator};

use super::monte_carlo::{verify_monte_carlo, SampledLaw};
use super::noncentral::{density_checks, verify_operator_against_density};
use super::quadrature::{verify_quadrature, QuadratureConfig};
use super::report::{TestResult, VerificationReport};
use super::symbolic::{verify_symbolic, verify_symbolic_moments};
use super::testfn::TestFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Symbolic,
    Quadrature,
    MonteCarlo,
    Density,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "symbolic" => Ok(Method::Symbolic),
            "quadrature" => Ok(Method::Quadrature),
            "mc" | "monte-carlo" => Ok(Method::MonteCarlo),
            "density" => Ok(Method::Density),
            other => Err(Error::Parse(format!(
                "unknown method '{other}'; expected symbolic, quadrature, mc or density"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub methods: Vec<Method>,
    pub suite: Vec<TestFunction>,
    /// Monomials `x^0..=x^max_degree` for the symbolic check.
    pub max_degree: usize,
    pub quadrature: QuadratureConfig,
    pub samples: usize,
    pub seed: u64,
    /// Tolerance of the density-based checks.
    pub density_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            methods: vec![Method::Symbolic, Method::Quadrature],
            suite: TestFunction::default_suite(),
            max_degree: 30,
            quadrature: QuadratureConfig::default(),
            samples: 1_000_000,
            seed: 0x5EED,
            density_tol: 1e-8,
        }
    }
}

/// Runs the selected methods for `op` against `W = P(Z)`.
pub fn verify_pushforward(op: &DiffOperator, p: &Polynomial, opts: &VerifyOptions) -> Result<VerificationReport> {
    let mut reports = Vec::new();
    for method in &opts.methods {
        reports.push(match method {
            Method::Symbolic => verify_symbolic(op, p, opts.max_degree),
            Method::Quadrature => verify_quadrature(op, p, &opts.suite, &opts.quadrature)?,
            Method::MonteCarlo => verify_monte_carlo(
                op,
                &SampledLaw::Pushforward(p.clone()),
                &opts.suite,
                opts.samples,
                opts.seed,
            )?,
            Method::Density => {
                return Err(Error::InvalidParameters(
                    "the density method applies only to the non-central chi-square".into(),
                ))
            }
        });
    }
    Ok(VerificationReport::merge(reports))
}

/// Runs the selected methods for a catalog entry. Non-central entries use
/// exact cumulant moments in place of the symbolic pushforward check and the
/// density for quadrature.
pub fn verify_entry(entry: &CatalogEntry, opts: &VerifyOptions) -> Result<VerificationReport> {
    let op = entry
        .operator
        .as_ref()
        .ok_or_else(|| Error::InvalidParameters(format!("catalog entry '{}' has no known operator", entry.key)))?;
    if let Some(p) = &entry.pushforward {
        return verify_pushforward(op, p, opts);
    }
    let params = entry.noncentral.as_ref().ok_or_else(|| {
        Error::InvalidParameters(format!("catalog entry '{}' has no law to verify against", entry.key))
    })?;
    let mut reports = Vec::new();
    for method in &opts.methods {
        reports.push(match method {
            Method::Symbolic => {
                let top = op.max_degree().unwrap_or(0);
                let moments = params.moments(opts.max_degree + top);
                verify_symbolic_moments(op, &moments, opts.max_degree)
            }
            Method::Quadrature => verify_operator_against_density(op, params, &opts.suite, opts.density_tol)?,
            Method::Density => VerificationReport::merge(vec![
                density_checks(params, 1e-10, opts.density_tol)?,
                verify_operator_against_density(op, params, &opts.suite, opts.density_tol)?,
            ]),
            Method::MonteCarlo => verify_monte_carlo(
                op,
                &SampledLaw::Noncentral(params.clone()),
                &opts.suite,
                opts.samples,
                opts.seed,
            )?,
        });
    }
    Ok(VerificationReport::merge(reports))
}

/// Adds one to each coefficient `[x^d] p_m` with `m <= order`, `d <= max
/// degree` in turn. Each test passes iff the mutated operator fails
/// quadrature on `suite`.
pub fn mutation_control(
    op: &DiffOperator,
    p: &Polynomial,
    suite: &[TestFunction],
    config: &QuadratureConfig,
) -> Result<VerificationReport> {
    let top = op.max_degree().unwrap_or(0);
    let mut tests = Vec::new();
    for m in 0..=op.order() {
        for d in 0..=top {
            let mut unit = vec![Polynomial::zero(); m + 1];
            unit[m] = Polynomial::monomial(Rational::one(), d);
            let mutated = op.add(&DiffOperator::new(unit));
            let r = verify_quadrature(&mutated, p, suite, config)?;
            let mut t = TestResult::within(format!("p{m}[x^{d}] + 1"), r.max_abs_residual(), config.tol)
                .with_param("order", m)
                .with_param("degree", d);
            t.pass = !r.pass;
            tests.push(t);
        }
    }
    Ok(VerificationReport::new("mutation", tests))
}
