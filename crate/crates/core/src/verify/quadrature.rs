//! Residuals `E[g(Z)]` for integrands built from an operator or an
//! expectation vector, evaluated with a Gaussian quadrature rule.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{horner_f64, Polynomial};
use crate::gaussian::quadrature::{gauss_hermite_rule, normal_pdf, oscillation_adapted_rule, oscillation_node_count};
use crate::gaussian::QuadratureRule;
use crate::ibp::ExpectationVector;
use crate::operator::DiffOperator;

use super::precise::precise_operator_residual;
use super::report::{TestResult, VerificationReport};
use super::testfn::TestFunction;

/// Tail mass target: the integrand bound times the density at the
/// truncation point.
const TAIL: f64 = 1e-18;

/// Largest f64 composite rule built before switching to multiprecision.
const MAX_F64_NODES: usize = 1 << 21;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    /// Composite Gauss–Legendre with panels adapted to the oscillation of
    /// `f(P(z))`; `nodes` is the number of points per panel. Operator
    /// residuals switch to [`RuleKind::Precise`] when the rule would exceed
    /// `MAX_F64_NODES` or its rounding bound exceeds `tol / 8`.
    Adaptive,
    /// Multiprecision quadrature, along decaying rays for sine and cosine.
    Precise,
    /// Plain `nodes`-point Gauss–Hermite rule.
    GaussHermite,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureConfig {
    pub rule: RuleKind,
    pub nodes: usize,
    pub tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rule: RuleKind::Adaptive,
            nodes: 201,
            tol: 1e-8,
        }
    }
}

fn abs_coeffs(p: &Polynomial) -> Vec<f64> {
    p.to_f64_coeffs().iter().map(|c| c.abs()).collect()
}

/// Smallest `L >= 6` (step 1/2) with `bound(L) phi(L) <= TAIL`.
fn truncation(bound: impl Fn(f64) -> f64) -> f64 {
    let mut l: f64 = 6.0;
    while l < 400.0 && !(bound(l) * normal_pdf(l) <= TAIL) {
        l += 0.5;
    }
    l
}

/// Rule and its parameters for integrands oscillating like `f(P(z))`.
pub(crate) fn build_rule(
    p: &Polynomial,
    f: &TestFunction,
    config: &QuadratureConfig,
    bound: impl Fn(f64) -> f64,
) -> Result<(QuadratureRule, serde_json::Map<String, serde_json::Value>)> {
    let mut params = serde_json::Map::new();
    params.insert("rule".into(), serde_json::to_value(config.rule).unwrap());
    let rule = match config.rule {
        RuleKind::GaussHermite => {
            params.insert("nodes".into(), config.nodes.into());
            gauss_hermite_rule(config.nodes)?
        }
        RuleKind::Adaptive | RuleKind::Precise => {
            let l = truncation(bound);
            let count = oscillation_node_count(p, f.frequency(), config.nodes, l, MAX_F64_NODES).ok_or_else(|| {
                Error::InvalidParameters(format!(
                    "composite rule for {} on [-{l}, {l}] exceeds {MAX_F64_NODES} nodes",
                    f.name()
                ))
            })?;
            let rule = oscillation_adapted_rule(p, f.frequency(), config.nodes, l);
            debug_assert_eq!(rule.len(), count);
            params.insert("points_per_panel".into(), config.nodes.into());
            params.insert("total_nodes".into(), rule.len().into());
            params.insert("half_width".into(), l.into());
            rule
        }
    };
    Ok((rule, params))
}

fn precise_residual(
    op: &DiffOperator,
    p: &Polynomial,
    f: &TestFunction,
    config: &QuadratureConfig,
) -> Result<(f64, serde_json::Map<String, serde_json::Value>)> {
    let r = precise_operator_residual(op, p, f, config.tol)?;
    let mut params = serde_json::Map::new();
    params.insert("rule".into(), serde_json::to_value(RuleKind::Precise).unwrap());
    params.insert("path".into(), serde_json::to_value(r.path).unwrap());
    params.insert("total_nodes".into(), r.nodes.into());
    params.insert("precision_bits".into(), r.precision_bits.into());
    params.insert("rounding_estimate".into(), r.error_estimate.into());
    Ok((r.value, params))
}

/// `E[(A f)(P(Z))]` by quadrature.
pub fn operator_residual(
    op: &DiffOperator,
    p: &Polynomial,
    f: &TestFunction,
    config: &QuadratureConfig,
) -> Result<(f64, serde_json::Map<String, serde_json::Value>)> {
    f.check_order(op.order())?;
    if config.rule == RuleKind::Precise {
        return precise_residual(op, p, f, config);
    }
    let coeffs = op.to_f64_coefficients();
    let abs: Vec<Vec<f64>> = op.coefficients().iter().map(abs_coeffs).collect();
    let p_f = p.to_f64_coeffs();
    let p_abs = abs_coeffs(p);
    let bound = |z: f64| {
        let w = horner_f64(&p_abs, z);
        abs.iter()
            .enumerate()
            .map(|(m, c)| horner_f64(c, w) * f.derivative_bound(m, w))
            .sum::<f64>()
    };
    let (rule, mut params) = match build_rule(p, f, config, bound) {
        Ok(built) => built,
        Err(Error::InvalidParameters(_)) if config.rule == RuleKind::Adaptive => {
            return precise_residual(op, p, f, config);
        }
        Err(e) => return Err(e),
    };
    let order = op.order();
    let value = rule.expectation(|z| {
        let w = horner_f64(&p_f, z);
        let mut d = [0.0; 16];
        f.derivatives_into(&mut d[..=order], w);
        DiffOperator::eval_f64(&coeffs, w, &d[..=order])
    });
    // Magnitudes entering the sum before cancellation, at the actual nodes.
    let scale = rule.expectation(|z| {
        let w = horner_f64(&p_f, z);
        let mut d = [0.0; 16];
        f.derivatives_into(&mut d[..=order], w);
        abs.iter()
            .zip(&d[..=order])
            .map(|(c, dm)| horner_f64(c, w.abs()) * dm.abs())
            .sum::<f64>()
    });
    let rounding = 4.0 * f64::EPSILON * scale;
    params.insert("rounding_estimate".into(), rounding.into());
    if config.rule == RuleKind::Adaptive && !(rounding <= config.tol / 8.0) {
        return precise_residual(op, p, f, config);
    }
    Ok((value, params))
}

/// `sum c_{ij} E[Z^i f^(j)(P(Z))]` by quadrature.
pub fn expectation_vector_residual(
    v: &ExpectationVector,
    p: &Polynomial,
    f: &TestFunction,
    config: &QuadratureConfig,
) -> Result<f64> {
    let terms: Vec<(i32, usize, f64)> = v.iter().map(|(t, c)| (t.i as i32, t.j, c.to_f64())).collect();
    let top_j = terms.iter().map(|t| t.1).max().unwrap_or(0);
    f.check_order(top_j)?;
    let p_f = p.to_f64_coeffs();
    let p_abs = abs_coeffs(p);
    let bound = |z: f64| {
        let w = horner_f64(&p_abs, z);
        terms
            .iter()
            .map(|&(i, j, c)| c.abs() * z.powi(i) * f.derivative_bound(j, w))
            .sum::<f64>()
    };
    let (rule, _) = build_rule(p, f, config, bound)?;
    Ok(rule.expectation(|z| {
        let w = horner_f64(&p_f, z);
        let mut d = [0.0; 16];
        f.derivatives_into(&mut d[..=top_j], w);
        terms.iter().map(|&(i, j, c)| c * z.powi(i) * d[j]).sum()
    }))
}

/// `E[h(P(Z))]` by quadrature.
pub fn target_expectation(p: &Polynomial, h: &TestFunction, config: &QuadratureConfig) -> Result<f64> {
    let op = DiffOperator::new(vec![Polynomial::one()]);
    operator_residual(&op, p, h, config).map(|(v, _)| v)
}

/// One quadrature residual per suite function; passes iff each
/// `|residual| <= tol`.
pub fn verify_quadrature(
    op: &DiffOperator,
    p: &Polynomial,
    suite: &[TestFunction],
    config: &QuadratureConfig,
) -> Result<VerificationReport> {
    let tests = suite
        .par_iter()
        .map(|f| {
            let (residual, params) = operator_residual(op, p, f, config)?;
            let mut t = TestResult::within(f.name(), residual, config.tol);
            t.params = params;
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::new("quadrature", tests))
}
