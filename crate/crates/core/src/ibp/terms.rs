use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Polynomial, Rational};
use crate::operator::DiffOperator;

/// The term `T(i, j) = E[Z^i f^(j)(W)]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TermIndex {
    pub i: usize,
    pub j: usize,
}

impl TermIndex {
    pub fn new(i: usize, j: usize) -> Self {
        TermIndex { i, j }
    }
}

impl fmt::Display for TermIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T({},{})", self.i, self.j)
    }
}

/// Finite rational combination of terms. No stored coefficient is zero.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct ExpectationVector {
    terms: BTreeMap<TermIndex, Rational>,
}

impl ExpectationVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((usize, usize), Rational)>) -> Self {
        let mut v = Self::new();
        for ((i, j), c) in terms {
            v.add_term(TermIndex::new(i, j), &c);
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.terms
            .get(&TermIndex::new(i, j))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TermIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, t: TermIndex, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(t).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&t);
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &ExpectationVector, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (t, v) in &other.terms {
            self.add_term(*t, &(v * c));
        }
    }

    pub fn scale(&self, c: &Rational) -> ExpectationVector {
        let mut out = ExpectationVector::new();
        out.add_scaled(self, c);
        out
    }

    pub fn max_z_power(&self) -> Option<usize> {
        self.terms.keys().map(|t| t.i).max()
    }

    pub fn max_derivative(&self) -> Option<usize> {
        self.terms.keys().map(|t| t.j).max()
    }
}

impl std::ops::Sub for &ExpectationVector {
    type Output = ExpectationVector;

    fn sub(self, rhs: &ExpectationVector) -> ExpectationVector {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl fmt::Display for ExpectationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (t, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            let a = c.abs();
            if !a.is_one() {
                write!(f, "{a}")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ExpectationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExpectationVector[{self}]")
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    i: usize,
    j: usize,
    value: Rational,
}

impl Serialize for ExpectationVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(t, v)| TermJson {
                i: t.i,
                j: t.j,
                value: v.clone(),
            })
            .collect();
        terms.serialize(s)
    }
}

/// Coefficients of `P'`, lowest degree first. Errors for constant `P`.
pub(crate) fn derivative_coeffs(p: &Polynomial) -> Result<Vec<Rational>> {
    match p.degree() {
        Some(d) if d >= 1 => Ok(p.derivative(1).into_coeffs()),
        _ => Err(Error::DegeneratePushforward),
    }
}

/// `T(k,j) - (k-1) T(k-2,j) - sum_l c_l T(k-1+l, j+1)` with
/// `P' = sum_l c_l z^l`: Gaussian integration by parts applied to
/// `z^{k-1} f^(j)(P(z))`.
pub fn ibp_identity(k: usize, j: usize, p: &Polynomial) -> Result<ExpectationVector> {
    if k == 0 {
        return Err(Error::InvalidParameters("identity index k must be >= 1".into()));
    }
    let c = derivative_coeffs(p)?;
    let mut v = ExpectationVector::new();
    v.add_term(TermIndex::new(k, j), &Rational::one());
    if k >= 2 {
        v.add_term(TermIndex::new(k - 2, j), &-Rational::from_int(k as i64 - 1));
    }
    for (l, cl) in c.iter().enumerate() {
        v.add_term(TermIndex::new(k - 1 + l, j + 1), &-cl.clone());
    }
    Ok(v)
}

/// `E[sum_m p_m(W) f^(m)(W)]` expanded over `W^d = P(Z)^d`.
pub fn operator_image(op: &DiffOperator, p: &Polynomial) -> ExpectationVector {
    let mut powers = vec![Polynomial::one()];
    let mut v = ExpectationVector::new();
    for (m, pm) in op.coefficients().iter().enumerate() {
        for (d, c) in pm.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            while powers.len() <= d {
                let next = powers.last().unwrap() * p;
                powers.push(next);
            }
            for (i, a) in powers[d].coeffs().iter().enumerate() {
                if !a.is_zero() {
                    v.add_term(TermIndex::new(i, m), &(a * c));
                }
            }
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::hermite;

    fn ev(terms: &[((usize, usize), i64)]) -> ExpectationVector {
        ExpectationVector::from_terms(terms.iter().map(|&(t, c)| (t, Rational::from_int(c))))
    }

    #[test]
    fn identity_examples() {
        assert_eq!(
            ibp_identity(1, 0, &Polynomial::x()).unwrap(),
            ev(&[((1, 0), 1), ((0, 1), -1)])
        );
        assert_eq!(
            ibp_identity(1, 0, &hermite(3)).unwrap(),
            ev(&[((1, 0), 1), ((2, 1), -3), ((0, 1), 3)])
        );
        let p = Polynomial::from_ints(&[0, 2, 1]);
        assert_eq!(
            ibp_identity(2, 0, &p).unwrap(),
            ev(&[((2, 0), 1), ((0, 0), -1), ((2, 1), -2), ((1, 1), -2)])
        );
    }

    #[test]
    fn identity_errors() {
        assert_eq!(
            ibp_identity(1, 0, &Polynomial::from_ints(&[3])),
            Err(Error::DegeneratePushforward)
        );
        assert!(ibp_identity(0, 0, &Polynomial::x()).is_err());
    }

    #[test]
    fn image_examples() {
        let normal = DiffOperator::from_ints(&[&[0, -1], &[1]]);
        assert_eq!(
            operator_image(&normal, &Polynomial::x()),
            ev(&[((0, 1), 1), ((1, 0), -1)])
        );
        let chi = DiffOperator::from_ints(&[&[0, -1], &[2, 2]]);
        assert_eq!(
            operator_image(&chi, &hermite(2)),
            ev(&[((2, 1), 2), ((2, 0), -1), ((0, 0), 1)])
        );
        assert!(operator_image(&DiffOperator::zero(), &hermite(3)).is_zero());
    }

    #[test]
    fn zero_coefficients_are_not_stored() {
        let mut v = ev(&[((1, 1), 2)]);
        v.add_term(TermIndex::new(1, 1), &Rational::from_int(-2));
        assert!(v.is_zero());
        assert_eq!(v.to_string(), "0");
    }

    #[test]
    fn display_and_json() {
        let v = ev(&[((1, 0), 1), ((0, 1), -3)]);
        assert_eq!(v.to_string(), "-3T(0,1) + T(1,0)");
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, r#"[{"i":0,"j":1,"value":"-3"},{"i":1,"j":0,"value":"1"}]"#);
    }
}
