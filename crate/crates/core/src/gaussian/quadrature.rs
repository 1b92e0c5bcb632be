//! Quadrature against the standard Gaussian measure.
//!
//! [`gauss_hermite_rule`] builds the classical n-point rule (exact for
//! polynomials of degree `2n - 1`). [`oscillation_adapted_rule`] builds a
//! composite Gauss–Legendre rule with the Gaussian density folded into the
//! weights. Its panel widths shrink where `sin(omega * P(z))` oscillates
//! fast, which Gauss–Hermite rules of any practical size cannot resolve once
//! `deg P >= 3`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Polynomial;

const MOMENT_TOL: f64 = 1e-12;

/// Nodes and weights approximating `E[g(Z)]` by `sum w_i g(z_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    n: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    fn from_parts(nodes: Vec<f64>, weights: Vec<f64>) -> Self {
        debug_assert_eq!(nodes.len(), weights.len());
        QuadratureRule {
            n: nodes.len(),
            nodes,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum w_i g(z_i)` with compensated summation.
    pub fn expectation(&self, g: impl Fn(f64) -> f64) -> f64 {
        let mut acc = NeumaierSum::default();
        for (&z, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * g(z));
        }
        acc.value()
    }

    /// `sum w_i g(z_i)` together with `sum |w_i g(z_i)|`, which bounds the
    /// magnitudes cancelling in the sum.
    pub fn expectation_with_scale(&self, g: impl Fn(f64) -> f64) -> (f64, f64) {
        let mut acc = NeumaierSum::default();
        let mut scale = 0.0;
        for (&z, &w) in self.nodes.iter().zip(&self.weights) {
            let t = w * g(z);
            acc.add(t);
            scale += t.abs();
        }
        (acc.value(), scale)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("rule serializes")
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Default, Clone, Copy, Debug)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Orthonormal Hermite values `h_0(x)..h_{n}(x)` where `h_k = He_k / sqrt(k!)`.
fn orthonormal_hermite(n: usize, x: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n + 1);
    h.push(1.0);
    if n == 0 {
        return h;
    }
    h.push(x);
    for k in 1..n {
        let next = (x * h[k] - (k as f64).sqrt() * h[k - 1]) / ((k + 1) as f64).sqrt();
        h.push(next);
    }
    h
}

fn newton_polish(n: usize, mut x: f64) -> f64 {
    for _ in 0..20 {
        let h = orthonormal_hermite(n, x);
        let f = h[n];
        let df = (n as f64).sqrt() * h[n - 1];
        if df == 0.0 || !df.is_finite() {
            break;
        }
        let step = f / df;
        x -= step;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            break;
        }
    }
    x
}

/// Christoffel number `1 / sum_{k<n} h_k(x)^2`.
fn christoffel_weight(n: usize, x: f64) -> f64 {
    let h = orthonormal_hermite(n - 1, x);
    let mut acc = NeumaierSum::default();
    for v in h {
        acc.add(v * v);
    }
    1.0 / acc.value()
}

/// The n-point probabilists' Gauss–Hermite rule for weight
/// `exp(-z^2/2)/sqrt(2 pi)`.
///
/// Nodes are eigenvalues of the symmetric Jacobi matrix (off-diagonal
/// `sqrt(k)`), refined by Newton's method and mirrored so the rule is exactly
/// symmetric. The rule is checked against the exact Gaussian moments up to
/// degree `2n - 1` before it is returned.
pub fn gauss_hermite_rule(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidParameters("a quadrature rule needs n >= 1".into()));
    }
    let rule = if n == 1 {
        QuadratureRule::from_parts(vec![0.0], vec![1.0])
    } else {
        let jacobi = DMatrix::from_fn(n, n, |i, j| {
            if i + 1 == j || j + 1 == i {
                (i.max(j) as f64).sqrt()
            } else {
                0.0
            }
        });
        let mut eig: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| a.total_cmp(b));

        let half = n / 2;
        let positive: Vec<f64> = eig[n - half..].iter().map(|&x0| newton_polish(n, x0.abs())).collect();
        let mut nodes: Vec<f64> = positive.iter().rev().map(|x| -x).collect();
        if n % 2 == 1 {
            nodes.push(0.0);
        }
        nodes.extend(positive.iter().copied());

        let mut weights: Vec<f64> = nodes.iter().map(|&x| christoffel_weight(n, x)).collect();
        // Enforce exact mirror symmetry of the weights.
        for i in 0..half {
            let w = 0.5 * (weights[i] + weights[n - 1 - i]);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        let mut total = NeumaierSum::default();
        for i in 0..half {
            total.add(weights[i] + weights[n - 1 - i]);
        }
        if n % 2 == 1 {
            total.add(weights[half]);
        }
        let total = total.value();
        for w in weights.iter_mut() {
            *w /= total;
        }
        QuadratureRule::from_parts(nodes, weights)
    };
    validate_moments(&rule)?;
    Ok(rule)
}

/// Relative moment error of the rule at degree `k`, computed in the log
/// domain so degrees in the hundreds do not overflow.
pub fn moment_error(rule: &QuadratureRule, k: usize) -> f64 {
    if k == 0 {
        let s: f64 = rule.weights.iter().sum();
        return (s - 1.0).abs();
    }
    let log_moment: f64 = (1..k).step_by(2).map(|j| (j as f64).ln()).sum();
    let n = rule.n;
    let term = |i: usize| -> f64 {
        let x = rule.nodes[i];
        if x == 0.0 {
            0.0
        } else {
            (rule.weights[i].ln() + k as f64 * x.abs().ln() - log_moment).exp()
        }
    };
    let mut signed = NeumaierSum::default();
    let mut total = NeumaierSum::default();
    for i in 0..n.div_ceil(2) {
        let j = n - 1 - i;
        let (a, b) = (term(i), if j != i { term(j) } else { 0.0 });
        let sign_i = if k % 2 == 1 && rule.nodes[i] < 0.0 { -1.0 } else { 1.0 };
        let sign_j = if k % 2 == 1 && rule.nodes[j] < 0.0 { -1.0 } else { 1.0 };
        signed.add(sign_i * a + sign_j * b);
        total.add(a + b);
    }
    if k % 2 == 0 {
        (signed.value() - 1.0).abs()
    } else if total.value() == 0.0 {
        0.0
    } else {
        signed.value().abs() / total.value()
    }
}

fn validate_moments(rule: &QuadratureRule) -> Result<()> {
    let n = rule.n;
    if !rule.nodes.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::QuadratureValidation {
            n,
            degree: 0,
            error: f64::NAN,
        });
    }
    for k in 0..2 * n {
        let error = moment_error(rule, k);
        let tol = if k == 0 { 1e-13 } else { MOMENT_TOL };
        if !(error <= tol) {
            return Err(Error::QuadratureValidation { n, degree: k, error });
        }
    }
    Ok(())
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { x } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (x * pm - pm1) / (x * x - 1.0);
            let step = pm / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        if m == 1 {
            dp = 1.0;
            x = 0.0;
        }
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre rule on `[a, b]` with `points` nodes per panel;
/// `width(z)` gives the panel width to use starting at `z`.
pub fn composite_legendre(a: f64, b: f64, points: usize, width: impl Fn(f64) -> f64) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(points);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut left = a;
    while left < b {
        let right = (left + width(left).max(1e-9)).min(b);
        let half = 0.5 * (right - left);
        let mid = 0.5 * (right + left);
        for (&x, &w) in gx.iter().zip(&gw) {
            nodes.push(mid + half * x);
            weights.push(half * w);
        }
        left = right;
    }
    (nodes, weights)
}

fn oscillation_width(p: &Polynomial, frequency: f64, points: usize) -> impl Fn(f64) -> f64 {
    let slope: Vec<f64> = p.derivative(1).to_f64_coeffs().iter().map(|c| c.abs()).collect();
    let omega = frequency.abs().max(1.0);
    // On a panel starting at z >= 0 of width <= 1, |P'| <= slope(z + 1).
    move |z: f64| {
        let s = crate::exact::horner_f64(&slope, z + 1.0).max(1e-300);
        (points as f64 / (2.0 * omega * s)).min(1.0)
    }
}

/// Number of nodes [`oscillation_adapted_rule`] would use, or `None` above
/// `cap`.
pub fn oscillation_node_count(
    p: &Polynomial,
    frequency: f64,
    points: usize,
    half_width: f64,
    cap: usize,
) -> Option<usize> {
    let width = oscillation_width(p, frequency, points);
    let mut left = 0.0;
    let mut nodes = 0;
    while left < half_width {
        left = (left + width(left).max(1e-9)).min(half_width);
        nodes += 2 * points;
        if nodes > cap {
            return None;
        }
    }
    Some(nodes)
}

/// Composite rule for `E[g(Z)]` where `g(z)` oscillates like
/// `sin(frequency * P(z))`. The domain is `[-half_width, half_width]`; the
/// node set is symmetric about zero so odd integrands cancel exactly.
pub fn oscillation_adapted_rule(p: &Polynomial, frequency: f64, points: usize, half_width: f64) -> QuadratureRule {
    let width = oscillation_width(p, frequency, points);
    let (half_nodes, half_weights) = composite_legendre(0.0, half_width, points, width);
    let norm = 1.0 / (2.0 * PI).sqrt();
    let mut nodes = Vec::with_capacity(2 * half_nodes.len());
    let mut weights = Vec::with_capacity(2 * half_nodes.len());
    for (&z, &w) in half_nodes.iter().zip(&half_weights).rev() {
        nodes.push(-z);
        weights.push(w * norm * (-0.5 * z * z).exp());
    }
    for (&z, &w) in half_nodes.iter().zip(&half_weights) {
        nodes.push(z);
        weights.push(w * norm * (-0.5 * z * z).exp());
    }
    QuadratureRule::from_parts(nodes, weights)
}

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::moments::gaussian_moment;

    #[test]
    fn one_point_rule() {
        let r = gauss_hermite_rule(1).unwrap();
        assert_eq!(r.nodes(), &[0.0]);
        assert_eq!(r.weights(), &[1.0]);
    }

    #[test]
    fn two_and_three_point_rules() {
        let r = gauss_hermite_rule(2).unwrap();
        assert!((r.nodes()[0] + 1.0).abs() < 1e-15 && (r.nodes()[1] - 1.0).abs() < 1e-15);
        assert!(r.weights().iter().all(|w| (w - 0.5).abs() < 1e-15));

        let r = gauss_hermite_rule(3).unwrap();
        let s3 = 3f64.sqrt();
        for (x, e) in r.nodes().iter().zip([-s3, 0.0, s3]) {
            assert!((x - e).abs() < 1e-14);
        }
        for (w, e) in r.weights().iter().zip([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0]) {
            assert!((w - e).abs() < 1e-14);
        }
    }

    #[test]
    fn rules_reproduce_gaussian_moments() {
        for n in (1..=60).chain([101, 201]) {
            let r = gauss_hermite_rule(n).unwrap();
            assert_eq!(r.len(), n);
            assert!((r.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-13);
            assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
            for i in 0..n {
                assert_eq!(r.nodes()[i], -r.nodes()[n - 1 - i]);
                assert_eq!(r.weights()[i], r.weights()[n - 1 - i]);
            }
            for k in 0..2 * n {
                assert!(moment_error(&r, k) <= 1e-12, "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn direct_moment_comparison_small_degree() {
        let r = gauss_hermite_rule(20).unwrap();
        for k in 0..20 {
            let exact = gaussian_moment(k).to_f64();
            let approx = r.expectation(|z| z.powi(k as i32));
            assert!((approx - exact).abs() <= 1e-12 * exact.max(1.0), "k = {k}");
        }
    }

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        for k in 0..14 {
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((s - exact).abs() < 1e-14, "k = {k}");
        }
        let (x, w) = gauss_legendre(1);
        assert_eq!((x[0], w[0]), (0.0, 2.0));
    }

    #[test]
    fn adapted_rule_resolves_cubic_oscillation() {
        // E[cos(Z^3 - 3Z)] by independent high-precision quadrature.
        let h3 = Polynomial::from_ints(&[0, -3, 0, 1]);
        let r = oscillation_adapted_rule(&h3, 1.0, 201, 11.0);
        assert!((r.weights().iter().sum::<f64>() - 1.0).abs() < 1e-13);
        let v = r.expectation(|z| (z * z * z - 3.0 * z).cos());
        assert!((v - 0.227_161_675_309_217).abs() < 1e-12, "{v}");
    }
}
