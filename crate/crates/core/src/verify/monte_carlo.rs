use crate::error::{Error, Result};
use crate::exact::{horner_f64, Polynomial};
use crate::gaussian::chunked_estimate;
use crate::operator::{DiffOperator, NoncentralParams};

use super::report::{TestResult, VerificationReport};
use super::testfn::TestFunction;

/// Standard errors allowed before an estimate of zero is rejected.
pub const MC_GATE: f64 = 5.0;

pub const MIN_SAMPLES: usize = 10_000;

/// How `W` is drawn from standard Gaussians.
#[derive(Clone, Debug)]
pub enum SampledLaw {
    /// `W = P(Z)`.
    Pushforward(Polynomial),
    /// `W = sum (Z_i + mu_i)^2`.
    Noncentral(NoncentralParams),
}

/// Draws per sample and the map from those draws to `W`.
type Sampler = (usize, Box<dyn Fn(&[f64]) -> f64 + Sync>);

impl SampledLaw {
    fn sampler(&self) -> Result<Sampler> {
        match self {
            SampledLaw::Pushforward(p) => {
                let c = p.to_f64_coeffs();
                Ok((1, Box::new(move |z: &[f64]| horner_f64(&c, z[0]))))
            }
            SampledLaw::Noncentral(params) => {
                let means = params.sampling_means()?;
                Ok((
                    means.len(),
                    Box::new(move |z: &[f64]| z.iter().zip(&means).map(|(z, m)| (z + m) * (z + m)).sum()),
                ))
            }
        }
    }
}

/// Estimate of `E[(A f)(W)]` for each suite function, with the `5 SE` gate.
/// Every function uses the same variates, drawn from `seed`.
pub fn verify_monte_carlo(
    op: &DiffOperator,
    law: &SampledLaw,
    suite: &[TestFunction],
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParameters(format!(
            "Monte Carlo needs at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    let (draws, w_of) = law.sampler()?;
    let coeffs = op.to_f64_coefficients();
    let order = op.order();
    let mut tests = Vec::new();
    for f in suite {
        f.check_order(order)?;
        let g = |z: &[f64]| {
            let w = w_of(z);
            let mut d = [0.0; 16];
            f.derivatives_into(&mut d[..=order], w);
            DiffOperator::eval_f64(&coeffs, w, &d[..=order])
        };
        let est = chunked_estimate(seed, samples, draws, g);
        let se = est.standard_error();
        let mut t = TestResult::within(f.name(), est.mean, MC_GATE * se)
            .with_param("samples", samples)
            .with_param("seed", seed)
            .with_param("standard_error", se);
        if se == 0.0 {
            t.pass = est.mean == 0.0;
        }
        tests.push(t);
    }
    Ok(VerificationReport::new("monte-carlo", tests))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::hermite;
    use crate::operator::catalog::{h3_operator, normal_operator};

    #[test]
    fn normal_operator_with_square() {
        let law = SampledLaw::Pushforward(Polynomial::x());
        let r = verify_monte_carlo(&normal_operator(), &law, &[TestFunction::Monomial(2)], 1_000_000, 11).unwrap();
        assert!(r.pass, "{r:?}");
        // (A x^2)(Z) = 2Z - Z^3 has variance 4 - 12 + 15 = 7.
        let se = r.tests[0].params["standard_error"].as_f64().unwrap();
        assert!((se - (7.0f64 / 1e6).sqrt()).abs() < 1e-4, "{se}");
    }

    #[test]
    fn deterministic_given_seed() {
        let law = SampledLaw::Pushforward(hermite(3));
        let a = verify_monte_carlo(&h3_operator(), &law, &[TestFunction::Sine(1.0)], 20_000, 5).unwrap();
        let b = verify_monte_carlo(&h3_operator(), &law, &[TestFunction::Sine(1.0)], 20_000, 5).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn wrong_operator_is_rejected() {
        let law = SampledLaw::Pushforward(Polynomial::x());
        let flipped = DiffOperator::from_ints(&[&[0, 1], &[1]]);
        let r = verify_monte_carlo(&flipped, &law, &[TestFunction::Monomial(1)], 100_000, 3).unwrap();
        assert!(!r.pass);
        assert!(verify_monte_carlo(&flipped, &law, &[TestFunction::Monomial(1)], 10, 3).is_err());
    }
}
