//! Published operators transcribed from the source text, independent of the
//! catalog, so that the catalog and the derivation can be checked against
//! them.

use steinforge::{DiffOperator, Polynomial, Rational};

fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

/// `f' - x f`.
pub fn published_normal() -> DiffOperator {
    DiffOperator::from_ints(&[&[0, -1], &[1]])
}

/// `2(1 + x) f' - x f`.
pub fn published_centered_chi2() -> DiffOperator {
    DiffOperator::from_ints(&[&[0, -1], &[2, 2]])
}

/// Fifth-order operator for `H_3(Z)`.
pub fn published_h3() -> DiffOperator {
    DiffOperator::from_ints(&[&[0, -1], &[6], &[0, 99], &[-216, 0, 27], &[0, -486], &[1944, 0, -486]])
}

/// Third-order operator for `H_4(Z)`.
pub fn published_h4() -> DiffOperator {
    DiffOperator::from_ints(&[&[0, -1], &[24, 44], &[-576, -144, 16], &[3456, -576, -192]])
}

/// `(ab^2 + 4a^2(x - c)) f'' + (2a^2 - b^2 - 4a(x - c)) f' + (x - c - a) f`.
pub fn published_quadratic(a: i64, b: i64, c: i64) -> DiffOperator {
    let x_minus_c = Polynomial::from_ints(&[-c, 1]);
    let p2 = &Polynomial::constant(q(a * b * b)) + &x_minus_c.scale(&q(4 * a * a));
    let p1 = &Polynomial::constant(q(2 * a * a - b * b)) - &x_minus_c.scale(&q(4 * a));
    let p0 = Polynomial::from_ints(&[-c - a, 1]);
    DiffOperator::new(vec![p0, p1, p2])
}

/// `4x f'' + (2k - 4x) f' + (x - k - lambda) f`.
pub fn published_noncentral(k: &Rational, lambda: &Rational) -> DiffOperator {
    DiffOperator::new(vec![
        Polynomial::from_coeffs(vec![-(k + lambda), q(1)]),
        Polynomial::from_coeffs(vec![k * &q(2), q(-4)]),
        Polynomial::from_ints(&[0, 4]),
    ])
}

/// `(k, lambda)` pairs used for the non-central checks.
pub fn noncentral_pairs() -> Vec<(Rational, Rational)> {
    vec![(q(1), q(1)), (q(2), Rational::new(1, 2)), (q(4), q(3))]
}

/// Catalog operators with a pushforward, each with its published form.
pub fn pushforward_entries() -> Vec<(&'static str, DiffOperator)> {
    vec![
        ("normal", published_normal()),
        ("centered-chi2", published_centered_chi2()),
        ("h3", published_h3()),
        ("h4", published_h4()),
        ("quadratic:1,0,0", published_quadratic(1, 0, 0)),
        ("quadratic:1,2,1", published_quadratic(1, 2, 1)),
        ("quadratic:1,-3,0", published_quadratic(1, -3, 0)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_family_specializes_to_the_normal() {
        // a = 0, b = 1, c = 0 is W = Z.
        let op = published_quadratic(0, 1, 0);
        assert!(op.proportional_eq(&published_normal()).unwrap().equal);
    }

    #[test]
    fn noncentral_form() {
        let op = published_noncentral(&q(2), &Rational::new(1, 2));
        assert_eq!(op.coefficient(2), Polynomial::from_ints(&[0, 4]));
        assert_eq!(
            op.coefficient(0),
            Polynomial::from_coeffs(vec![Rational::new(-5, 2), q(1)])
        );
    }
}
