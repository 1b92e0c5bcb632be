use num_bigint::BigInt;
use num_traits::One;

use crate::exact::{Polynomial, Rational};

/// The `n`-th probabilists' Hermite polynomial, via
/// `H_{n+1} = x H_n - n H_{n-1}`.
pub fn hermite(n: usize) -> Polynomial {
    let mut prev = Polynomial::one();
    if n == 0 {
        return prev;
    }
    let mut cur = Polynomial::x();
    for k in 1..n {
        let next = &cur.shift(1) - &prev.scale(&Rational::from_int(k as i64));
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// `(n-1)!!` as a big integer, with `(-1)!! = 1`.
fn double_factorial_odd(n: usize) -> BigInt {
    (1..n).step_by(2).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `E[Z^n]` for standard Gaussian `Z`: zero for odd `n`, `(n-1)!!` otherwise.
pub fn gaussian_moment(n: usize) -> Rational {
    if n % 2 == 1 {
        Rational::zero()
    } else {
        Rational::from_bigint(double_factorial_odd(n))
    }
}

/// `E[p(Z)]`, termwise.
pub fn gaussian_expectation(p: &Polynomial) -> Rational {
    p.coeffs()
        .iter()
        .enumerate()
        .filter(|(i, c)| i % 2 == 0 && !c.is_zero())
        .map(|(i, c)| c * gaussian_moment(i))
        .sum()
}

/// `E[P(Z)^d]`.
pub fn pushforward_moment(p: &Polynomial, d: usize) -> Rational {
    let power = Polynomial::monomial(Rational::one(), d).compose(p);
    gaussian_expectation(&power)
}

/// Moments `mu_0..=mu_n` of `W = P(Z)`, built from successive powers of `P`
/// so a whole table costs one multiplication per degree.
#[derive(Clone, Debug)]
pub struct PushforwardMoments {
    poly: Polynomial,
    power: Polynomial,
    moments: Vec<Rational>,
}

impl PushforwardMoments {
    pub fn new(p: &Polynomial) -> Self {
        PushforwardMoments {
            poly: p.clone(),
            power: Polynomial::one(),
            moments: vec![Rational::one()],
        }
    }

    pub fn with_degree(p: &Polynomial, n: usize) -> Self {
        let mut table = PushforwardMoments::new(p);
        table.extend_to(n);
        table
    }

    pub fn extend_to(&mut self, n: usize) {
        while self.moments.len() <= n {
            self.power = &self.power * &self.poly;
            self.moments.push(gaussian_expectation(&self.power));
        }
    }

    /// `mu_d`, extending the table as needed.
    pub fn get(&mut self, d: usize) -> &Rational {
        self.extend_to(d);
        &self.moments[d]
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.moments
    }

    /// `E[q(W)]` for a polynomial `q`.
    pub fn expectation(&mut self, q: &Polynomial) -> Rational {
        if let Some(deg) = q.degree() {
            self.extend_to(deg);
        }
        q.coeffs()
            .iter()
            .zip(&self.moments)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, m)| c * m)
            .sum()
    }
}
