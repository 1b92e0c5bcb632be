use crate::exact::{Polynomial, Rational};
use crate::gaussian::PushforwardMoments;
use crate::operator::DiffOperator;

use super::report::{TestResult, VerificationReport};

fn exact_test(n: usize, residual: Rational) -> TestResult {
    let mut t = TestResult::within(format!("x^{n}"), residual.to_f64(), 0.0)
        .with_param("degree", n)
        .with_param("exact", residual.to_string());
    t.pass = residual.is_zero();
    t
}

/// Exact `E[(A x^n)(P(Z))]` for `n = 0..=max_degree`; passes iff all vanish.
pub fn verify_symbolic(op: &DiffOperator, p: &Polynomial, max_degree: usize) -> VerificationReport {
    let mut moments = PushforwardMoments::new(p);
    let tests = (0..=max_degree)
        .map(|n| exact_test(n, moments.expectation(&op.apply_to_monomial(n))))
        .collect();
    VerificationReport::new("symbolic", tests)
}

/// As [`verify_symbolic`], with the law given by its moment sequence.
/// `moments` must reach degree `max_degree + max deg(p_m)`.
pub fn verify_symbolic_moments(op: &DiffOperator, moments: &[Rational], max_degree: usize) -> VerificationReport {
    let tests = (0..=max_degree)
        .map(|n| {
            let image = op.apply_to_monomial(n);
            let residual = image
                .coeffs()
                .iter()
                .zip(moments)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, m)| c * m)
                .sum();
            assert!(
                image.degree().is_none_or(|d| d < moments.len()),
                "moment table too short for degree {n}"
            );
            exact_test(n, residual)
        })
        .collect();
    VerificationReport::new("symbolic", tests)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::hermite;
    use crate::operator::catalog::{h3_operator, h4_operator, normal_operator, NoncentralParams};

    #[test]
    fn published_operators_annihilate_monomials() {
        assert!(verify_symbolic(&h3_operator(), &hermite(3), 30).pass);
        assert!(verify_symbolic(&h4_operator(), &hermite(4), 30).pass);
    }

    #[test]
    fn sign_flip_fails_at_degree_one() {
        let flipped = DiffOperator::from_ints(&[&[0, 1], &[1]]);
        let r = verify_symbolic(&flipped, &Polynomial::x(), 2);
        assert!(!r.pass);
        assert!(r.tests[0].pass);
        assert!(!r.tests[1].pass);
        assert_eq!(r.tests[1].params["exact"], "2");
        assert!(verify_symbolic(&normal_operator(), &Polynomial::x(), 2).pass);
    }

    #[test]
    fn noncentral_by_moments() {
        let params = NoncentralParams::new(Rational::from_int(4), Rational::from_int(3)).unwrap();
        let moments = params.moments(32);
        assert!(verify_symbolic_moments(&params.operator(), &moments, 30).pass);
        let wrong = NoncentralParams::new(Rational::from_int(4), Rational::from_int(2)).unwrap();
        assert!(!verify_symbolic_moments(&wrong.operator(), &moments, 30).pass);
    }
}
