use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Highest derivative order with a closed form.
pub const MAX_DERIVATIVE: usize = 12;

/// Smooth test functions with closed-form derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TestFunction {
    Monomial(u32),
    Sine(f64),
    Cosine(f64),
    /// `exp(-x^2/2)`, with `d^m/dx^m = (-1)^m He_m(x) exp(-x^2/2)`.
    GaussianBump,
}

fn he(m: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if m == 0 {
        return 1.0;
    }
    for k in 1..m {
        let next = x * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

impl TestFunction {
    /// `{sine(1), cosine(1/2), gaussian-bump}`.
    pub fn default_suite() -> Vec<TestFunction> {
        vec![
            TestFunction::Sine(1.0),
            TestFunction::Cosine(0.5),
            TestFunction::GaussianBump,
        ]
    }

    pub fn name(&self) -> String {
        match self {
            TestFunction::Monomial(n) => format!("monomial({n})"),
            TestFunction::Sine(w) => format!("sine({w})"),
            TestFunction::Cosine(w) => format!("cosine({w})"),
            TestFunction::GaussianBump => "gaussian-bump".into(),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivative(0, x).expect("order 0 always exists")
    }

    pub fn check_order(&self, m: usize) -> Result<()> {
        if m > MAX_DERIVATIVE {
            return Err(Error::DerivativeUnavailable {
                name: self.name(),
                order: m,
            });
        }
        Ok(())
    }

    pub fn derivative(&self, m: usize, x: f64) -> Result<f64> {
        self.check_order(m)?;
        Ok(self.derivative_unchecked(m, x))
    }

    fn derivative_unchecked(&self, m: usize, x: f64) -> f64 {
        match *self {
            TestFunction::Monomial(n) => {
                let n = n as usize;
                if m > n {
                    return 0.0;
                }
                let ff: f64 = ((n - m + 1)..=n).map(|v| v as f64).product();
                ff * x.powi((n - m) as i32)
            }
            TestFunction::Sine(w) => {
                let s = w.powi(m as i32);
                let t = w * x;
                s * match m % 4 {
                    0 => t.sin(),
                    1 => t.cos(),
                    2 => -t.sin(),
                    _ => -t.cos(),
                }
            }
            TestFunction::Cosine(w) => {
                let s = w.powi(m as i32);
                let t = w * x;
                s * match m % 4 {
                    0 => t.cos(),
                    1 => -t.sin(),
                    2 => -t.cos(),
                    _ => t.sin(),
                }
            }
            TestFunction::GaussianBump => {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * he(m, x) * (-0.5 * x * x).exp()
            }
        }
    }

    /// `f(x), f'(x), ..., f^(order)(x)`.
    pub fn derivatives(&self, order: usize, x: f64) -> Result<Vec<f64>> {
        self.check_order(order)?;
        Ok((0..=order).map(|m| self.derivative_unchecked(m, x)).collect())
    }

    pub(crate) fn derivatives_into(&self, out: &mut [f64], x: f64) {
        for (m, slot) in out.iter_mut().enumerate() {
            *slot = self.derivative_unchecked(m, x);
        }
    }

    /// Upper bound for `|f^(m)(x)|` over `|x| <= r`.
    pub fn derivative_bound(&self, m: usize, r: f64) -> f64 {
        match *self {
            TestFunction::Monomial(n) => {
                let n = n as usize;
                if m > n {
                    0.0
                } else {
                    let ff: f64 = ((n - m + 1)..=n).map(|v| v as f64).product();
                    ff * r.max(1.0).powi((n - m) as i32)
                }
            }
            TestFunction::Sine(w) | TestFunction::Cosine(w) => w.abs().powi(m as i32),
            // |He_m(x)| exp(-x^2/4) <= 1.09 sqrt(m!)
            TestFunction::GaussianBump => {
                let fact: f64 = (1..=m).map(|v| v as f64).product();
                1.09 * fact.sqrt()
            }
        }
    }

    /// Angular frequency governing oscillation in the argument.
    pub fn frequency(&self) -> f64 {
        match *self {
            TestFunction::Sine(w) | TestFunction::Cosine(w) => w.abs(),
            TestFunction::GaussianBump => 2.0,
            TestFunction::Monomial(_) => 1.0,
        }
    }

    /// Central-difference check of each derivative against the next,
    /// returning the worst relative error over `points`.
    pub fn finite_difference_error(&self, order: usize, points: &[f64]) -> Result<f64> {
        self.check_order(order)?;
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for &x in points {
            for m in 1..=order {
                let fd =
                    (self.derivative_unchecked(m - 1, x + h) - self.derivative_unchecked(m - 1, x - h)) / (2.0 * h);
                let exact = self.derivative_unchecked(m, x);
                let scale = exact.abs().max(1e-3 * self.derivative_bound(m, x.abs())).max(1e-300);
                worst = worst.max((fd - exact).abs() / scale);
            }
        }
        Ok(worst)
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Serialize for TestFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    /// `sine(1)`, `cosine(0.5)`, `gaussian-bump`, `monomial(3)`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Parse(format!("unknown test function `{t}`"));
        if t == "gaussian-bump" {
            return Ok(TestFunction::GaussianBump);
        }
        let (name, arg) = t.strip_suffix(')').and_then(|r| r.split_once('(')).ok_or_else(bad)?;
        match name.trim() {
            "sine" => Ok(TestFunction::Sine(arg.trim().parse().map_err(|_| bad())?)),
            "cosine" => Ok(TestFunction::Cosine(arg.trim().parse().map_err(|_| bad())?)),
            "monomial" => Ok(TestFunction::Monomial(arg.trim().parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const POINTS: [f64; 10] = [-2.7, -2.1, -1.3, -0.6, -0.05, 0.3, 0.9, 1.7, 2.4, 3.1];

    #[test]
    fn derivatives_agree_with_finite_differences() {
        let mut suite = TestFunction::default_suite();
        suite.extend([TestFunction::Monomial(7), TestFunction::Sine(2.5)]);
        for f in suite {
            let err = f.finite_difference_error(MAX_DERIVATIVE, &POINTS).unwrap();
            assert!(err <= 1e-6, "{f}: {err}");
        }
    }

    #[test]
    fn order_limit() {
        let f = TestFunction::Sine(1.0);
        assert!(f.derivative(12, 0.3).is_ok());
        assert!(matches!(
            f.derivative(13, 0.3),
            Err(Error::DerivativeUnavailable { order: 13, .. })
        ));
    }

    #[test]
    fn closed_forms() {
        let b = TestFunction::GaussianBump;
        let x: f64 = 0.7;
        let e = (-0.5 * x * x).exp();
        assert!((b.derivative(2, x).unwrap() - (x * x - 1.0) * e).abs() < 1e-15);
        assert!((b.derivative(3, x).unwrap() + (x.powi(3) - 3.0 * x) * e).abs() < 1e-15);
        assert_eq!(TestFunction::Monomial(3).derivative(2, 2.0).unwrap(), 12.0);
        assert_eq!(TestFunction::Monomial(3).derivative(4, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn bounds_dominate() {
        for f in TestFunction::default_suite() {
            for m in 0..=MAX_DERIVATIVE {
                let b = f.derivative_bound(m, 10.0);
                for i in -100..=100 {
                    let x = i as f64 / 10.0;
                    assert!(
                        f.derivative(m, x).unwrap().abs() <= b * (1.0 + 1e-12),
                        "{f} m={m} x={x}"
                    );
                }
            }
        }
    }

    #[test]
    fn parse_names() {
        for f in TestFunction::default_suite() {
            assert_eq!(f.name().parse::<TestFunction>().unwrap(), f);
        }
        assert_eq!(
            "monomial(4)".parse::<TestFunction>().unwrap(),
            TestFunction::Monomial(4)
        );
        assert!("tan(1)".parse::<TestFunction>().is_err());
    }
}
