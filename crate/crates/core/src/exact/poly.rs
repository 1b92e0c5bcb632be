//! Dense univariate polynomials over the rationals.
//!
//! Coefficients are stored lowest degree first. The representation is
//! canonical: the zero polynomial is the empty vector, and otherwise the
//! last coefficient is nonzero.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Rational;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial::constant(Rational::one())
    }

    /// The indeterminate `x`.
    pub fn x() -> Self {
        Polynomial::monomial(Rational::one(), 1)
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::from_coeffs(vec![c])
    }

    /// `c * x^deg`.
    pub fn monomial(c: Rational, deg: usize) -> Self {
        if c.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Rational::zero(); deg + 1];
        coeffs[deg] = c;
        Polynomial { coeffs }
    }

    /// Builds from coefficients lowest degree first; trailing zeros are
    /// stripped.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Polynomial::from_coeffs(coeffs.iter().map(|&c| Rational::from_int(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Rational::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Coefficient of `x^i`; zero beyond the degree.
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial { coeffs }
    }

    pub fn pow(&self, exp: usize) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// The `order`-th derivative; zero once `order` exceeds the degree.
    pub fn derivative(&self, order: usize) -> Polynomial {
        if order == 0 {
            return self.clone();
        }
        if order >= self.coeffs.len() {
            return Polynomial::zero();
        }
        let coeffs = self.coeffs[order..]
            .iter()
            .enumerate()
            .map(|(i, c)| c * Rational::from_bigint(falling_factorial(i + order, order)))
            .collect();
        Polynomial::from_coeffs(coeffs)
    }

    /// `self(inner(x))`, by Horner's scheme over polynomials.
    pub fn compose(&self, inner: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Polynomial::constant(c.clone());
        }
        acc
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        horner_f64(&self.to_f64_coeffs(), x)
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(Rational::to_f64).collect()
    }

    /// Positive gcd of numerators over lcm of denominators; zero for the zero
    /// polynomial. Dividing by it leaves coprime integer coefficients.
    pub fn content(&self) -> Rational {
        content_of(self.coeffs.iter())
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut c = self.content();
        if self.leading_coeff().is_some_and(Rational::is_negative) {
            c = -c;
        }
        self.scale(&c.recip())
    }

    /// If `self = r * other` for a nonzero rational `r`, returns `r`.
    pub fn ratio_to(&self, other: &Polynomial) -> Option<Rational> {
        if self.is_zero() || other.is_zero() || self.degree() != other.degree() {
            return None;
        }
        let r = self.leading_coeff()? / other.leading_coeff()?;
        (other.scale(&r) == *self).then_some(r)
    }
}

/// `n (n-1) ... (n-k+1)`.
pub fn falling_factorial(n: usize, k: usize) -> BigInt {
    ((n + 1 - k)..=n).fold(BigInt::one(), |acc, v| acc * BigInt::from(v))
}

pub(crate) fn horner_f64(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// gcd of numerators over lcm of denominators, positive; zero when all
/// entries are zero.
pub(crate) fn content_of<'a>(values: impl Iterator<Item = &'a Rational>) -> Rational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for v in values {
        if v.is_zero() {
            continue;
        }
        num = num.gcd(v.numer());
        den = den.lcm(v.denom());
    }
    if num.is_zero() {
        Rational::zero()
    } else {
        Rational::from_parts(num, den)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Polynomial::from_coeffs(coeffs)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += &(a * b);
            }
        }
        Polynomial::from_coeffs(coeffs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// Prints in the input grammar, highest degree first: `x^3 - 3x`, `1/2x^2 + x`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (deg, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match deg {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}")?;
                    }
                    if deg == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{deg}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(Polynomial::from_coeffs(Vec::<Rational>::deserialize(deserializer)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_ints(c)
    }

    #[test]
    fn cancellation_trims() {
        let h3 = p(&[0, -3, 0, 1]);
        assert_eq!(&h3 + &p(&[0, 3]), p(&[0, 0, 0, 1]));
        assert_eq!((&h3 - &h3).coeffs().len(), 0);
        assert_eq!((&h3 - &h3).degree(), None);
    }

    #[test]
    fn product_of_linear_factors() {
        // (x+6)(3-x)
        assert_eq!(&p(&[6, 1]) * &p(&[3, -1]), p(&[18, -3, -1]));
    }

    #[test]
    fn scale_by_rational() {
        assert_eq!(p(&[-4, 0, 1]).scale(&Rational::from_int(486)), p(&[-1944, 0, 486]));
        assert!(p(&[1, 2]).scale(&Rational::zero()).is_zero());
    }

    #[test]
    fn derivatives() {
        assert_eq!(p(&[0, -3, 0, 1]).derivative(1), p(&[-3, 0, 3]));
        assert!(p(&[0, 0, 0, 0, 1]).derivative(5).is_zero());
        let h4 = p(&[3, 0, -6, 0, 1]);
        let h3 = p(&[0, -3, 0, 1]);
        assert_eq!(h4.derivative(1), h3.scale(&Rational::from_int(4)));
        assert_eq!(h4.derivative(4), p(&[24]));
    }

    #[test]
    fn composition() {
        let sq = p(&[0, 0, 1]);
        assert_eq!(sq.compose(&p(&[0, -3, 0, 1])), p(&[0, 0, 9, 0, -6, 0, 1]));
        let h4 = p(&[3, 0, -6, 0, 1]);
        assert_eq!(Polynomial::x().compose(&h4), h4);
        assert_eq!(sq.compose(&h4), p(&[9, 0, -36, 0, 42, 0, -12, 0, 1]));
    }

    #[test]
    fn evaluation() {
        let h3 = p(&[0, -3, 0, 1]);
        assert_eq!(h3.eval(&Rational::from_int(2)), Rational::from_int(2));
        assert_eq!(h3.eval(&Rational::from_int(-1)), Rational::from_int(2));
        assert_eq!(p(&[3, 0, -6, 0, 1]).eval(&Rational::zero()), Rational::from_int(3));
        assert_eq!(p(&[7, 1, 1]).eval(&Rational::zero()), Rational::from_int(7));
        assert_eq!(h3.eval_f64(0.5), 0.125 - 1.5);
    }

    #[test]
    fn display() {
        assert_eq!(p(&[0, -3, 0, 1]).to_string(), "x^3 - 3x");
        assert_eq!(p(&[18, -3, -1]).to_string(), "-x^2 - 3x + 18");
        let half = Polynomial::from_coeffs(vec![Rational::zero(), Rational::one(), Rational::new(1, 2)]);
        assert_eq!(half.to_string(), "1/2x^2 + x");
        assert_eq!(Polynomial::zero().to_string(), "0");
    }

    #[test]
    fn primitive_form() {
        assert_eq!(p(&[1944, 0, -486]).primitive(), p(&[-4, 0, 1]));
        let r = p(&[1944, 0, -486]).ratio_to(&p(&[-4, 0, 1])).unwrap();
        assert_eq!(r, Rational::from_int(-486));
        assert!(p(&[1, 1]).ratio_to(&p(&[1, 2])).is_none());
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((-20i64..20, 1i64..5), 0..6)
            .prop_map(|cs| Polynomial::from_coeffs(cs.into_iter().map(|(n, d)| Rational::new(n, d)).collect()))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
        }

        #[test]
        fn results_are_trimmed(a in arb_poly(), b in arb_poly()) {
            for r in [&a + &b, &a - &b, &a * &b] {
                prop_assert!(r.coeffs().last().is_none_or(|c| !c.is_zero()));
                prop_assert_eq!(Polynomial::from_coeffs(r.coeffs().to_vec()), r.clone());
            }
        }

        #[test]
        fn multiplication_adds_degrees(a in arb_poly(), b in arb_poly()) {
            if let (Some(da), Some(db)) = (a.degree(), b.degree()) {
                prop_assert_eq!((&a * &b).degree(), Some(da + db));
            }
        }

        #[test]
        fn composition_multiplies_degrees(a in arb_poly(), b in arb_poly()) {
            if let (Some(da), Some(db)) = (a.degree(), b.degree()) {
                if da > 0 && db > 0 {
                    prop_assert_eq!(a.compose(&b).degree(), Some(da * db));
                }
            }
        }

        #[test]
        fn derivative_orders_add(a in arb_poly(), i in 0usize..4, j in 0usize..4) {
            prop_assert_eq!(a.derivative(i + j), a.derivative(i).derivative(j));
        }
    }
}
