//! Density-based checks for the non-central chi-square law.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::gaussian::quadrature::{composite_legendre, NeumaierSum};
use crate::operator::{DiffOperator, NoncentralParams};

use super::report::{TestResult, VerificationReport};
use super::testfn::TestFunction;

const PANEL_POINTS: usize = 64;

/// Modified Bessel function of the first kind by its power series,
/// `sum_k (x/2)^{nu+2k} / (k! Gamma(nu+k+1))`, for `nu > -1`, `x >= 0`.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    if !(nu > -1.0) || !(x >= 0.0) {
        return Err(Error::InvalidParameters(format!(
            "bessel_i needs nu > -1 and x >= 0, got nu = {nu}, x = {x}"
        )));
    }
    if x == 0.0 {
        return Ok(match nu {
            0.0 => 1.0,
            n if n > 0.0 => 0.0,
            _ => f64::INFINITY,
        });
    }
    let half = 0.5 * x;
    let mut term = (nu * half.ln() - ln_gamma(nu + 1.0)).exp();
    let q = half * half;
    let mut sum = NeumaierSum::default();
    sum.add(term);
    for k in 0..100_000usize {
        let kf = k as f64;
        let ratio = q / ((kf + 1.0) * (nu + kf + 1.0));
        term *= ratio;
        sum.add(term);
        let s = sum.value();
        if !s.is_finite() || !term.is_finite() {
            return Err(Error::BesselOverflow(x));
        }
        if ratio < 1.0 && term < 1e-17 * s {
            return Ok(s);
        }
    }
    Err(Error::BesselOverflow(x))
}

/// Non-central chi-square density; zero for `x <= 0`. `lambda = 0` uses the
/// central chi-square density.
pub fn noncentral_pdf(x: f64, params: &NoncentralParams) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let k = params.k_f64();
    let lambda = params.lambda_f64();
    if lambda == 0.0 {
        let h = 0.5 * k;
        return Ok(((h - 1.0) * x.ln() - 0.5 * x - h * std::f64::consts::LN_2 - ln_gamma(h)).exp());
    }
    let nu = 0.5 * k - 1.0;
    let bessel = bessel_i(nu, (lambda * x).sqrt())?;
    Ok(0.5 * (-(x + lambda) / 2.0).exp() * (x / lambda).powf(0.25 * k - 0.5) * bessel)
}

/// Upper end of the integration range, `k + lambda + 40 sqrt(2(k + 2 lambda))`.
pub fn density_cutoff(params: &NoncentralParams) -> f64 {
    let k = params.k_f64();
    let l = params.lambda_f64();
    k + l + 40.0 * (2.0 * (k + 2.0 * l)).sqrt()
}

/// Nodes `x_i` and weights `w_i p(x_i)` for `integral_0^cutoff g(x) p(x) dx`,
/// integrating over `u = sqrt(x)` so the endpoint behaviour of `p` is mild.
pub fn density_rule(params: &NoncentralParams, frequency: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let top = density_cutoff(params).sqrt();
    let omega = frequency.max(1.0);
    let (us, ws) = composite_legendre(0.0, top, PANEL_POINTS, |u| {
        (PANEL_POINTS as f64 / (8.0 * omega * (u + 1.0))).min(0.5)
    });
    let mut xs = Vec::with_capacity(us.len());
    let mut weights = Vec::with_capacity(us.len());
    for (u, w) in us.into_iter().zip(ws) {
        let x = u * u;
        xs.push(x);
        weights.push(w * 2.0 * u * noncentral_pdf(x, params)?);
    }
    Ok((xs, weights))
}

fn integrate(xs: &[f64], ws: &[f64], g: impl Fn(f64) -> f64) -> f64 {
    let mut s = NeumaierSum::default();
    for (&x, &w) in xs.iter().zip(ws) {
        s.add(w * g(x));
    }
    s.value()
}

/// `E[h(X)]` under the density.
pub fn noncentral_expectation(params: &NoncentralParams, h: &TestFunction) -> Result<f64> {
    let (xs, ws) = density_rule(params, h.frequency())?;
    Ok(integrate(&xs, &ws, |x| h.value(x)))
}

/// Normalization (`tol_mass`), mean `k + lambda` and variance
/// `2(k + 2 lambda)` (`tol_moments`) by quadrature of the density.
pub fn density_checks(params: &NoncentralParams, tol_mass: f64, tol_moments: f64) -> Result<VerificationReport> {
    let (xs, ws) = density_rule(params, 1.0)?;
    let k = params.k_f64();
    let l = params.lambda_f64();
    let mass = integrate(&xs, &ws, |_| 1.0);
    let mean = integrate(&xs, &ws, |x| x);
    let second = integrate(&xs, &ws, |x| x * x);
    let var = second - mean * mean;
    let cutoff = density_cutoff(params);
    let tests = vec![
        TestResult::within("normalization", mass - 1.0, tol_mass),
        TestResult::within("mean", mean - (k + l), tol_moments).with_param("expected", k + l),
        TestResult::within("variance", var - 2.0 * (k + 2.0 * l), tol_moments)
            .with_param("expected", 2.0 * (k + 2.0 * l)),
    ]
    .into_iter()
    .map(|t| t.with_param("cutoff", cutoff).with_param("nodes", xs.len()))
    .collect();
    Ok(VerificationReport::new("density", tests))
}

/// `integral (A f)(x) p(x) dx` for the non-central operator and each suite
/// function.
pub fn verify_noncentral_operator(
    params: &NoncentralParams,
    suite: &[TestFunction],
    tol: f64,
) -> Result<VerificationReport> {
    verify_operator_against_density(&params.operator(), params, suite, tol)
}

/// As [`verify_noncentral_operator`] for an arbitrary operator.
pub fn verify_operator_against_density(
    op: &DiffOperator,
    params: &NoncentralParams,
    suite: &[TestFunction],
    tol: f64,
) -> Result<VerificationReport> {
    let coeffs = op.to_f64_coefficients();
    let order = op.order();
    let cutoff = density_cutoff(params);
    let mut tests = Vec::new();
    for f in suite {
        f.check_order(order)?;
        let (xs, ws) = density_rule(params, f.frequency())?;
        let residual = integrate(&xs, &ws, |x| {
            let mut d = [0.0; 16];
            f.derivatives_into(&mut d[..=order], x);
            DiffOperator::eval_f64(&coeffs, x, &d[..=order])
        });
        tests.push(
            TestResult::within(f.name(), residual, tol)
                .with_param("cutoff", cutoff)
                .with_param("nodes", xs.len()),
        );
    }
    Ok(VerificationReport::new("density", tests))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Rational;
    use std::f64::consts::PI;

    fn params(k: i64, num: i64, den: i64) -> NoncentralParams {
        NoncentralParams::new(Rational::from_int(k), Rational::new(num, den)).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn bessel_values() {
        assert_eq!(bessel_i(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(1.0, 0.0).unwrap(), 0.0);
        let s = (2.0 / PI).sqrt();
        assert!(rel(bessel_i(0.5, 1.0).unwrap(), s * 1f64.sinh()) < 1e-14);
        assert!((bessel_i(0.5, 1.0).unwrap() - 0.937_674_888_245_487_6).abs() < 1e-13);
        for x in [0.1f64, 2.0, 17.0, 50.0, 100.0] {
            let c = (2.0 / (PI * x)).sqrt();
            assert!(rel(bessel_i(0.5, x).unwrap(), c * x.sinh()) < 1e-12, "x = {x}");
            assert!(rel(bessel_i(-0.5, x).unwrap(), c * x.cosh()) < 1e-12, "x = {x}");
            let i32 = c * (x.cosh() - x.sinh() / x);
            assert!(rel(bessel_i(1.5, x).unwrap(), i32) < 1e-12, "x = {x}");
        }
        assert!((bessel_i(0.0, 1.0).unwrap() - 1.266_065_877_752_008_4).abs() < 1e-13);
        assert!((bessel_i(1.0, 1.0).unwrap() - 0.565_159_103_992_485_1).abs() < 1e-13);
        assert!(matches!(bessel_i(0.0, 2000.0), Err(Error::BesselOverflow(_))));
        assert!(bessel_i(-1.0, 1.0).is_err());
    }

    #[test]
    fn one_degree_of_freedom_matches_shifted_square() {
        let mu: f64 = 1.3;
        let p = NoncentralParams::from_means(vec![Rational::new(13, 10)]).unwrap();
        let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
        for x in [0.01f64, 0.3, 1.0, 2.5, 4.0, 7.5, 12.0, 20.0, 33.0, 50.0] {
            let r = x.sqrt();
            let expected = (phi(r - mu) + phi(r + mu)) / (2.0 * r);
            assert!(rel(noncentral_pdf(x, &p).unwrap(), expected) < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn central_limit_branch() {
        let p = params(2, 0, 1);
        for x in [0.1f64, 1.0, 5.0] {
            assert!(rel(noncentral_pdf(x, &p).unwrap(), 0.5 * (-x / 2.0).exp()) < 1e-14);
        }
        let tiny = params(2, 1, 1_000_000_000);
        assert!(rel(noncentral_pdf(1.0, &tiny).unwrap(), 0.5 * (-0.5f64).exp()) < 1e-8);
        assert_eq!(noncentral_pdf(-1.0, &p).unwrap(), 0.0);
    }

    #[test]
    fn density_moments() {
        for p in [params(1, 1, 1), params(2, 1, 2), params(4, 3, 1), params(3, 0, 1)] {
            let r = density_checks(&p, 1e-10, 1e-8).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn operator_residuals() {
        let r = verify_noncentral_operator(&params(1, 1, 1), &[TestFunction::Sine(1.0)], 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
        let r = verify_noncentral_operator(&params(4, 3, 1), &[TestFunction::GaussianBump], 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
        // f = x: 2k - 4 E X + E X^2 - (k + l) E X = Var X - 2(k + 2l) = 0.
        let r = verify_noncentral_operator(&params(2, 1, 2), &[TestFunction::Monomial(1)], 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
        let wrong = params(4, 2, 1).operator();
        let r = verify_operator_against_density(&wrong, &params(4, 3, 1), &[TestFunction::GaussianBump], 1e-8).unwrap();
        assert!(!r.pass);
    }
}
