//! Local extrema of Hermite polynomials and the highest-order coefficients
//! they are paired with.

use std::fmt;

use serde::Serialize;

use crate::exact::{Polynomial, Rational};
use crate::gaussian::hermite;
use crate::verify::report::{TestResult, VerificationReport};

/// An exact real of one of three shapes, evaluated to `f64` on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Radical {
    Rational(Rational),
    /// `coeff * (offset + sign * sqrt(radicand))`
    Linear {
        coeff: Rational,
        offset: Rational,
        sign: i8,
        radicand: Rational,
    },
    /// `coeff * sqrt(scale * (offset + sign * sqrt(radicand)))`
    Nested {
        coeff: Rational,
        scale: Rational,
        offset: Rational,
        sign: i8,
        radicand: Rational,
    },
}

impl Radical {
    pub fn int(v: i64) -> Self {
        Radical::Rational(Rational::from_int(v))
    }

    pub fn linear(coeff: i64, offset: i64, sign: i8, radicand: i64) -> Self {
        Radical::Linear {
            coeff: coeff.into(),
            offset: offset.into(),
            sign,
            radicand: radicand.into(),
        }
    }

    pub fn nested(coeff: i64, scale: i64, offset: i64, sign: i8, radicand: i64) -> Self {
        Radical::Nested {
            coeff: coeff.into(),
            scale: scale.into(),
            offset: offset.into(),
            sign,
            radicand: radicand.into(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Radical::Rational(r) => r.to_f64(),
            Radical::Linear {
                coeff,
                offset,
                sign,
                radicand,
            } => coeff.to_f64() * (offset.to_f64() + f64::from(*sign) * radicand.to_f64().sqrt()),
            Radical::Nested {
                coeff,
                scale,
                offset,
                sign,
                radicand,
            } => {
                let inner = offset.to_f64() + f64::from(*sign) * radicand.to_f64().sqrt();
                coeff.to_f64() * (scale.to_f64() * inner).sqrt()
            }
        }
    }
}

fn signed(sign: i8) -> char {
    if sign < 0 {
        '-'
    } else {
        '+'
    }
}

impl fmt::Display for Radical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radical::Rational(r) => write!(f, "{r}"),
            Radical::Linear {
                coeff,
                offset,
                sign,
                radicand,
            } => write!(f, "{coeff}*({offset} {} sqrt({radicand}))", signed(*sign)),
            Radical::Nested {
                coeff,
                scale,
                offset,
                sign,
                radicand,
            } => write!(f, "{coeff}*sqrt({scale}*({offset} {} sqrt({radicand})))", signed(*sign)),
        }
    }
}

impl Serialize for Radical {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Radical", 2)?;
        st.serialize_field("exact", &self.to_string())?;
        st.serialize_field("value", &self.to_f64())?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extremum {
    pub value: Radical,
    pub multiplicity: usize,
}

impl Extremum {
    fn once(value: Radical) -> Self {
        Extremum { value, multiplicity: 1 }
    }

    fn twice(value: Radical) -> Self {
        Extremum { value, multiplicity: 2 }
    }
}

/// One row of the extrema / leading-coefficient table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub n: usize,
    pub maxima: Vec<Extremum>,
    pub minima: Vec<Extremum>,
    /// Highest-order coefficient exactly as tabulated (conjectured for
    /// `n >= 5`).
    pub leading_coefficient: Polynomial,
    /// Product of `x - v` over the distinct extremal values, when it differs
    /// from the tabulated coefficient.
    pub corrected_leading_coefficient: Option<Polynomial>,
    pub conjectured: bool,
}

/// Table rows for `n = 1..=6`.
pub fn table_row(n: usize) -> Option<TableRow> {
    let p = Polynomial::from_ints;
    let row = match n {
        1 => TableRow {
            n,
            maxima: vec![],
            minima: vec![],
            leading_coefficient: p(&[1]),
            corrected_leading_coefficient: None,
            conjectured: false,
        },
        2 => TableRow {
            n,
            maxima: vec![],
            minima: vec![Extremum::once(Radical::int(-1))],
            // Tabulated as `x`; the operator's coefficient is 2(1 + x).
            leading_coefficient: p(&[0, 1]),
            corrected_leading_coefficient: Some(p(&[1, 1])),
            conjectured: false,
        },
        3 => TableRow {
            n,
            maxima: vec![Extremum::once(Radical::int(2))],
            minima: vec![Extremum::once(Radical::int(-2))],
            leading_coefficient: p(&[-4, 0, 1]),
            corrected_leading_coefficient: None,
            conjectured: false,
        },
        4 => TableRow {
            n,
            maxima: vec![Extremum::once(Radical::int(3))],
            minima: vec![Extremum::twice(Radical::int(-6))],
            leading_coefficient: p(&[-18, 3, 1]),
            corrected_leading_coefficient: None,
            conjectured: false,
        },
        5 => TableRow {
            n,
            maxima: vec![
                Extremum::once(Radical::nested(4, 6, 3, 1, 6)),
                Extremum::once(Radical::nested(4, 6, 3, -1, 6)),
            ],
            minima: vec![
                Extremum::once(Radical::nested(-4, 6, 3, 1, 6)),
                Extremum::once(Radical::nested(-4, 6, 3, -1, 6)),
            ],
            leading_coefficient: p(&[27648, 0, -576, 0, 1]),
            corrected_leading_coefficient: None,
            conjectured: true,
        },
        6 => TableRow {
            n,
            maxima: vec![Extremum::twice(Radical::linear(20, -2, 1, 10))],
            minima: vec![
                Extremum::twice(Radical::linear(-20, 2, 1, 10)),
                Extremum::once(Radical::int(-15)),
            ],
            leading_coefficient: p(&[-3600, -1200, 95, 1]),
            corrected_leading_coefficient: Some(p(&[-36000, -1200, 95, 1])),
            conjectured: true,
        },
        _ => return None,
    };
    Some(row)
}

fn eval_hermite_f64(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return 1.0;
    }
    for k in 1..n {
        let next = x * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Real roots of `H_n`, ascending, by bisection on sign changes over a grid
/// covering the Cauchy root bound.
pub fn hermite_roots(n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![];
    }
    let h = hermite(n);
    let bound = 1.0 + h.coeffs().iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max);
    let steps = 4000;
    let dx = 2.0 * bound / steps as f64;
    let mut roots = Vec::new();
    let mut a = -bound;
    let mut fa = eval_hermite_f64(n, a);
    for s in 1..=steps {
        let b = -bound + s as f64 * dx;
        let fb = eval_hermite_f64(n, b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                let fm = eval_hermite_f64(n, mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if flo * fm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    roots
}

/// Local maxima and minima values of `H_n`, located at the roots of
/// `H_n' = n H_{n-1}` and classified by the sign of `H_n''`.
pub fn hermite_extrema(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    if n < 2 {
        return (maxima, minima);
    }
    for x in hermite_roots(n - 1) {
        let second = eval_hermite_f64(n - 2, x);
        let value = eval_hermite_f64(n, x);
        if second < 0.0 {
            maxima.push(value);
        } else {
            minima.push(value);
        }
    }
    maxima.sort_by(f64::total_cmp);
    minima.sort_by(f64::total_cmp);
    (maxima, minima)
}

fn expand(entries: &[Extremum]) -> Vec<(String, f64)> {
    let mut out: Vec<(String, f64)> = entries
        .iter()
        .flat_map(|e| std::iter::repeat_n((e.value.to_string(), e.value.to_f64()), e.multiplicity))
        .collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1));
    out
}

fn match_kind(kind: &str, listed: &[Extremum], computed: &[f64], tol: f64, tests: &mut Vec<TestResult>) {
    let listed = expand(listed);
    tests.push(
        TestResult::within(
            format!("{kind}-count"),
            computed.len() as f64 - listed.len() as f64,
            0.0,
        )
        .with_param("listed", listed.len())
        .with_param("computed", computed.len()),
    );
    for ((label, value), found) in listed.iter().zip(computed) {
        tests.push(
            TestResult::within(format!("{kind} {label}"), found - value, tol)
                .with_param("listed", *value)
                .with_param("computed", *found),
        );
    }
}

/// Compares the numerically located extrema of `H_n` with the table.
pub fn verify_table1_extrema(n: usize, tol: f64) -> Option<VerificationReport> {
    let row = table_row(n)?;
    let (maxima, minima) = hermite_extrema(n);
    let mut tests = Vec::new();
    match_kind("maximum", &row.maxima, &maxima, tol, &mut tests);
    match_kind("minimum", &row.minima, &minima, tol, &mut tests);
    Some(VerificationReport::new("extrema", tests))
}

/// `prod (x - v)` over the distinct extremal values of the row, in floating
/// point, lowest degree first.
pub fn extremal_product(row: &TableRow) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    for e in row.maxima.iter().chain(&row.minima) {
        let v = e.value.to_f64();
        let mut next = vec![0.0; coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= v * c;
        }
        coeffs = next;
    }
    coeffs
}
