use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{content_of, falling_factorial, Polynomial, Rational};
use crate::gaussian::PushforwardMoments;

/// `A f(x) = sum_m p_m(x) f^(m)(x)`.
///
/// `coefficients[m]` is `p_m`. The highest stored coefficient is nonzero; the
/// zero operator stores no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DiffOperator {
    coefficients: Vec<Polynomial>,
}

/// Outcome of comparing two operators up to a rational scalar.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Proportionality {
    pub equal: bool,
    /// `r` with `lhs = r * rhs`, when one exists.
    pub ratio: Option<Rational>,
}

impl DiffOperator {
    pub fn new(mut coefficients: Vec<Polynomial>) -> Self {
        while coefficients.last().is_some_and(Polynomial::is_zero) {
            coefficients.pop();
        }
        DiffOperator { coefficients }
    }

    pub fn zero() -> Self {
        DiffOperator::default()
    }

    /// Operator with integer coefficient lists, lowest degree first.
    pub fn from_ints(coefficients: &[&[i64]]) -> Self {
        DiffOperator::new(coefficients.iter().map(|c| Polynomial::from_ints(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Highest derivative order; 0 for the zero operator.
    pub fn order(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn coefficients(&self) -> &[Polynomial] {
        &self.coefficients
    }

    /// `p_m`, zero beyond the order.
    pub fn coefficient(&self, m: usize) -> Polynomial {
        self.coefficients.get(m).cloned().unwrap_or_else(Polynomial::zero)
    }

    /// Coefficient of the highest derivative.
    pub fn leading(&self) -> Option<&Polynomial> {
        self.coefficients.last()
    }

    /// Largest coefficient degree.
    pub fn max_degree(&self) -> Option<usize> {
        self.coefficients.iter().filter_map(Polynomial::degree).max()
    }

    pub fn scale(&self, c: &Rational) -> DiffOperator {
        DiffOperator::new(self.coefficients.iter().map(|p| p.scale(c)).collect())
    }

    pub fn add(&self, other: &DiffOperator) -> DiffOperator {
        let n = self.coefficients.len().max(other.coefficients.len());
        DiffOperator::new((0..n).map(|m| &self.coefficient(m) + &other.coefficient(m)).collect())
    }

    pub fn sub(&self, other: &DiffOperator) -> DiffOperator {
        self.add(&other.scale(&-Rational::one()))
    }

    /// `f -> A(f^(k))`.
    pub fn compose_derivative(&self, k: usize) -> DiffOperator {
        if self.is_zero() {
            return DiffOperator::zero();
        }
        let mut coefficients = vec![Polynomial::zero(); k];
        coefficients.extend(self.coefficients.iter().cloned());
        DiffOperator::new(coefficients)
    }

    /// `sum_m p_m f^(m)` for a polynomial `f`.
    pub fn apply_to_polynomial(&self, f: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, p) in self.coefficients.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let dm = f.derivative(m);
            if dm.is_zero() {
                break;
            }
            out = &out + &(p * &dm);
        }
        out
    }

    /// `A x^k` without forming the derivative polynomials.
    pub fn apply_to_monomial(&self, k: usize) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, p) in self.coefficients.iter().enumerate().take(k + 1) {
            if p.is_zero() {
                continue;
            }
            let ff = Rational::from_bigint(falling_factorial(k, m));
            out = &out + &p.shift(k - m).scale(&ff);
        }
        out
    }

    /// `E[(A f)(P(Z))]`, exactly.
    pub fn expectation_applied(&self, p: &Polynomial, f: &Polynomial) -> Rational {
        let mut moments = PushforwardMoments::new(p);
        moments.expectation(&self.apply_to_polynomial(f))
    }

    /// Replaces every `p_m(x)` by `p_m(x - c)`.
    pub fn translate(&self, c: &Rational) -> DiffOperator {
        if c.is_zero() {
            return self.clone();
        }
        let shift = Polynomial::from_coeffs(vec![-c, Rational::one()]);
        DiffOperator::new(self.coefficients.iter().map(|p| p.compose(&shift)).collect())
    }

    /// Coprime integer coefficients; `p_0` gets a negative leading
    /// coefficient, or if `p_0 = 0` the first nonzero `p_m` a positive one.
    pub fn normalize(&self) -> Result<DiffOperator> {
        let content = content_of(self.coefficients.iter().flat_map(|p| p.coeffs().iter()));
        if content.is_zero() {
            return Err(Error::ZeroOperator);
        }
        let first = self
            .coefficients
            .iter()
            .position(|p| !p.is_zero())
            .expect("nonzero operator");
        let lead = self.coefficients[first].leading_coeff().expect("nonzero");
        let want_negative = first == 0;
        let flip = lead.is_negative() != want_negative;
        let scale = if flip { -content.recip() } else { content.recip() };
        Ok(self.scale(&scale))
    }

    pub fn is_normalized(&self) -> bool {
        self.normalize().is_ok_and(|n| n == *self)
    }

    /// Whether `self = r * other` for some nonzero rational `r`.
    pub fn proportional_eq(&self, other: &DiffOperator) -> Result<Proportionality> {
        if self.is_zero() || other.is_zero() {
            return Err(Error::ZeroOperator);
        }
        let unequal = Proportionality {
            equal: false,
            ratio: None,
        };
        if self.order() != other.order() {
            return Ok(unequal);
        }
        let Some(ratio) = self.leading().unwrap().ratio_to(other.leading().unwrap()) else {
            return Ok(unequal);
        };
        if other.scale(&ratio) == *self {
            Ok(Proportionality {
                equal: true,
                ratio: Some(ratio),
            })
        } else {
            Ok(unequal)
        }
    }

    /// Coefficients evaluated in floating point, for numerical checks.
    pub fn to_f64_coefficients(&self) -> Vec<Vec<f64>> {
        self.coefficients.iter().map(Polynomial::to_f64_coeffs).collect()
    }

    /// `sum_m p_m(x) derivs[m]` in floating point.
    pub fn eval_f64(coeffs: &[Vec<f64>], x: f64, derivs: &[f64]) -> f64 {
        coeffs
            .iter()
            .zip(derivs)
            .map(|(c, d)| {
                if c.is_empty() {
                    0.0
                } else {
                    crate::exact::horner_f64(c, x) * d
                }
            })
            .sum()
    }

    /// Typeset form, highest derivative first, e.g.
    /// `486(4-x^2)f^{(5)}(x) - 486xf^{(4)}(x) - ... - xf(x)`.
    pub fn to_latex(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for m in (0..self.coefficients.len()).rev() {
            let p = &self.coefficients[m];
            if p.is_zero() {
                continue;
            }
            let (negative, body) = latex_coefficient(p);
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            out.push_str(&body);
            out.push_str(&latex_derivative(m));
        }
        out
    }

    /// One-line plain text form, e.g. `(-x^2 + 4)*D^2 + x*D^0`.
    pub fn to_plain(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for m in (0..self.coefficients.len()).rev() {
            let p = &self.coefficients[m];
            if !p.is_zero() {
                parts.push(format!("({p}) f^({m})"));
            }
        }
        parts.join(" + ")
    }
}

fn latex_derivative(m: usize) -> String {
    match m {
        0 => "f(x)".into(),
        1 => "f'(x)".into(),
        2 => "f''(x)".into(),
        _ => format!("f^{{({m})}}(x)"),
    }
}

fn latex_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

/// Returns the overall sign and the unsigned typeset coefficient. A
/// multi-term coefficient is written as `scalar(q)` with `q` primitive,
/// printed in ascending degree and with its lowest term positive.
fn latex_coefficient(p: &Polynomial) -> (bool, String) {
    let nonzero: Vec<(usize, &Rational)> = p.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
    if let [(e, c)] = nonzero[..] {
        let mut body = String::new();
        // A derivative symbol always follows, so a unit scalar is implicit.
        let magnitude = c.abs();
        if !magnitude.is_one() {
            body.push_str(&latex_rational(&magnitude));
        }
        body.push_str(&latex_monomial(e));
        return (c.is_negative(), body);
    }
    let content = p.content();
    let lowest = nonzero[0].1;
    let scalar = if lowest.is_negative() {
        -content.clone()
    } else {
        content.clone()
    };
    let q = p.scale(&scalar.recip());
    let mut inner = String::new();
    for (e, c) in q.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        if !inner.is_empty() || c.is_negative() {
            inner.push(if c.is_negative() { '-' } else { '+' });
        }
        let magnitude = c.abs();
        if e == 0 || !magnitude.is_one() {
            inner.push_str(&latex_rational(&magnitude));
        }
        inner.push_str(&latex_monomial(e));
    }
    let magnitude = scalar.abs();
    let body = if magnitude.is_one() {
        format!("({inner})")
    } else {
        format!("{}({inner})", latex_rational(&magnitude))
    };
    (scalar.is_negative(), body)
}

fn latex_monomial(e: usize) -> String {
    match e {
        0 => String::new(),
        1 => "x".into(),
        _ => format!("x^{e}"),
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_plain())
    }
}

impl fmt::Debug for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffOperator[{}]", self.to_plain())
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    order: usize,
    coefficients: Vec<Polynomial>,
}

impl Serialize for DiffOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorJson {
            order: self.order(),
            coefficients: self.coefficients.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiffOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = OperatorJson::deserialize(d)?;
        let op = DiffOperator::new(raw.coefficients);
        if op.order() != raw.order {
            return Err(serde::de::Error::custom(format!(
                "declared order {} but coefficients give order {}",
                raw.order,
                op.order()
            )));
        }
        Ok(op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::hermite;

    fn h3_op() -> DiffOperator {
        DiffOperator::from_ints(&[&[0, -1], &[6], &[0, 99], &[-216, 0, 27], &[0, -486], &[1944, 0, -486]])
    }

    fn h4_op() -> DiffOperator {
        // 192(x+6)(3-x), 16(x+3)(x-12), 4(11x+6), -x
        DiffOperator::from_ints(&[&[0, -1], &[24, 44], &[-576, -144, 16], &[3456, -576, -192]])
    }

    #[test]
    fn trimming_and_order() {
        let op = DiffOperator::new(vec![Polynomial::x(), Polynomial::zero()]);
        assert_eq!(op.order(), 0);
        assert!(DiffOperator::new(vec![Polynomial::zero()]).is_zero());
        assert_eq!(h3_op().order(), 5);
    }

    #[test]
    fn application_to_polynomials() {
        let x = Polynomial::x();
        assert_eq!(h3_op().apply_to_polynomial(&x), Polynomial::from_ints(&[6, 0, -1]));
        assert_eq!(h4_op().apply_to_polynomial(&x), Polynomial::from_ints(&[24, 44, -1]));
        assert!(h3_op().apply_to_polynomial(&Polynomial::zero()).is_zero());
        for k in 0..8 {
            let mono = Polynomial::monomial(Rational::one(), k);
            assert_eq!(h3_op().apply_to_monomial(k), h3_op().apply_to_polynomial(&mono));
        }
    }

    #[test]
    fn expectations_vanish() {
        let h3 = hermite(3);
        let h4 = hermite(4);
        let x = Polynomial::x();
        assert!(h3_op().expectation_applied(&h3, &x).is_zero());
        assert!(h3_op().expectation_applied(&h3, &x.pow(3)).is_zero());
        assert!(h4_op().expectation_applied(&h4, &x.pow(2)).is_zero());
        // E[f' + Wf] with f = x and W = Z is 2.
        let flipped = DiffOperator::from_ints(&[&[0, 1], &[1]]);
        assert_eq!(flipped.expectation_applied(&x, &x), Rational::from_int(2));
    }

    #[test]
    fn translation_round_trip() {
        let c = Rational::new(3, 2);
        let op = h4_op();
        assert_eq!(op.translate(&c).translate(&-c.clone()), op);
        assert_eq!(op.translate(&Rational::zero()), op);
    }

    #[test]
    fn normalization() {
        let op = DiffOperator::from_ints(&[&[0, -2], &[2]]);
        assert_eq!(op.normalize().unwrap(), DiffOperator::from_ints(&[&[0, -1], &[1]]));
        let flipped = DiffOperator::from_ints(&[&[0, 3], &[-3]]);
        assert_eq!(flipped.normalize().unwrap(), DiffOperator::from_ints(&[&[0, -1], &[1]]));
        let no_p0 = DiffOperator::from_ints(&[&[], &[-4, -2]]);
        assert_eq!(no_p0.normalize().unwrap(), DiffOperator::from_ints(&[&[], &[2, 1]]));
        assert!(h3_op().is_normalized());
        assert!(h4_op().is_normalized());
        assert_eq!(DiffOperator::zero().normalize(), Err(Error::ZeroOperator));
    }

    #[test]
    fn proportionality() {
        let a = h3_op();
        let b = a.scale(&Rational::new(-2, 7));
        let p = b.proportional_eq(&a).unwrap();
        assert!(p.equal);
        assert_eq!(p.ratio, Some(Rational::new(-2, 7)));
        let normal = DiffOperator::from_ints(&[&[0, -1], &[1]]);
        let chi = DiffOperator::from_ints(&[&[0, -1], &[2, 2]]);
        assert!(!normal.proportional_eq(&chi).unwrap().equal);
        assert!(normal.proportional_eq(&DiffOperator::zero()).is_err());
    }

    #[test]
    fn latex_matches_published_form() {
        assert_eq!(
            h3_op().to_latex(),
            "486(4-x^2)f^{(5)}(x) - 486xf^{(4)}(x) - 27(8-x^2)f^{(3)}(x) + 99xf''(x) + 6f'(x) - xf(x)"
        );
        assert_eq!(DiffOperator::from_ints(&[&[0, -1], &[1]]).to_latex(), "f'(x) - xf(x)");
        assert_eq!(
            DiffOperator::from_ints(&[&[0, -1], &[2, 2]]).to_latex(),
            "2(1+x)f'(x) - xf(x)"
        );
        assert_eq!(
            h4_op().to_latex(),
            "192(18-3x-x^2)f^{(3)}(x) - 16(36+9x-x^2)f''(x) + 4(6+11x)f'(x) - xf(x)"
        );
        let half = DiffOperator::new(vec![Polynomial::from_coeffs(vec![
            Rational::zero(),
            Rational::new(1, 2),
        ])]);
        assert_eq!(half.to_latex(), "\\frac{1}{2}xf(x)");
    }

    #[test]
    fn json_round_trip() {
        let op = h4_op();
        let text = serde_json::to_string(&op).unwrap();
        assert!(text.starts_with("{\"order\":3,\"coefficients\":[[\"0\",\"-1\"]"));
        let back: DiffOperator = serde_json::from_str(&text).unwrap();
        assert_eq!(back, op);
        let bad = r#"{"order":2,"coefficients":[["1"]]}"#;
        assert!(serde_json::from_str::<DiffOperator>(bad).is_err());
    }

    #[test]
    fn derivative_composition_shifts_coefficients() {
        let chi = DiffOperator::from_ints(&[&[0, -1], &[2, 2]]);
        let composed = chi.compose_derivative(1);
        assert_eq!(composed, DiffOperator::from_ints(&[&[], &[0, -1], &[2, 2]]));
        let f = Polynomial::from_ints(&[1, 2, 3, 4]);
        assert_eq!(
            composed.apply_to_polynomial(&f),
            chi.apply_to_polynomial(&f.derivative(1))
        );
    }
}
