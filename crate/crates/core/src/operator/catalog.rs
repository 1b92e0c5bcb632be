use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{Polynomial, Rational};
use crate::gaussian::hermite;

use super::extrema::{table_row, TableRow};
use super::DiffOperator;

/// Parameters of the non-central chi-square law with `k` degrees of freedom
/// and non-centrality `lambda`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NoncentralParams {
    pub k: Rational,
    pub lambda: Rational,
    /// Component means, when given; then `k = means.len()` and
    /// `lambda = sum means^2`.
    pub means: Option<Vec<Rational>>,
}

impl NoncentralParams {
    pub fn new(k: Rational, lambda: Rational) -> Result<Self> {
        if !k.is_positive() {
            return Err(Error::InvalidParameters(format!(
                "degrees of freedom k = {k} must be positive"
            )));
        }
        if lambda.is_negative() {
            return Err(Error::InvalidParameters(format!(
                "non-centrality lambda = {lambda} must be nonnegative"
            )));
        }
        Ok(NoncentralParams { k, lambda, means: None })
    }

    pub fn from_means(means: Vec<Rational>) -> Result<Self> {
        if means.is_empty() {
            return Err(Error::InvalidParameters("at least one mean is required".into()));
        }
        let lambda = means.iter().map(|m| m * m).sum();
        Ok(NoncentralParams {
            k: Rational::from_int(means.len() as i64),
            lambda,
            means: Some(means),
        })
    }

    pub fn k_f64(&self) -> f64 {
        self.k.to_f64()
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda.to_f64()
    }

    /// Means used to sample `X = sum (Z_i + mu_i)^2`: the given ones, or
    /// `(sqrt(lambda), 0, ..., 0)`. Requires integer `k`.
    pub fn sampling_means(&self) -> Result<Vec<f64>> {
        if let Some(m) = &self.means {
            return Ok(m.iter().map(Rational::to_f64).collect());
        }
        if !self.k.is_integer() {
            return Err(Error::InvalidParameters(format!(
                "sampling needs an integer number of degrees of freedom, got {}",
                self.k
            )));
        }
        let k: usize = self
            .k
            .numer()
            .try_into()
            .map_err(|_| Error::InvalidParameters("k too large to sample".into()))?;
        let mut means = vec![0.0; k];
        means[0] = self.lambda_f64().sqrt();
        Ok(means)
    }

    /// `4x f'' + (2k - 4x) f' + (x - k - lambda) f`.
    pub fn operator(&self) -> DiffOperator {
        let two_k = &self.k * Rational::from_int(2);
        DiffOperator::new(vec![
            Polynomial::from_coeffs(vec![-(&self.k + &self.lambda), Rational::one()]),
            Polynomial::from_coeffs(vec![two_k, Rational::from_int(-4)]),
            Polynomial::from_ints(&[0, 4]),
        ])
    }

    /// Exact raw moments `E[X^0..=X^n]` from the cumulants
    /// `kappa_r = 2^{r-1} (r-1)! (k + r lambda)`.
    pub fn moments(&self, n: usize) -> Vec<Rational> {
        let mut kappa = vec![Rational::zero()];
        let mut fact = BigInt::from(1);
        for r in 1..=n {
            if r > 1 {
                fact *= r - 1;
            }
            let scale = Rational::from_bigint(fact.clone() << (r - 1));
            kappa.push(scale * (&self.k + &self.lambda * Rational::from_int(r as i64)));
        }
        let mut mu = vec![Rational::one()];
        for m in 1..=n {
            let mut binom = BigInt::from(1);
            let mut acc = Rational::zero();
            for j in 0..m {
                acc += &(Rational::from_bigint(binom.clone()) * &kappa[j + 1] * &mu[m - 1 - j]);
                binom = binom * (m - 1 - j) / (j + 1);
            }
            mu.push(acc);
        }
        mu
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub key: String,
    pub description: String,
    pub operator: Option<DiffOperator>,
    /// `P` with `W = P(Z)`; absent for laws that are not a single-Gaussian
    /// polynomial pushforward.
    pub pushforward: Option<Polynomial>,
    pub noncentral: Option<NoncentralParams>,
    pub table: Option<TableRow>,
    pub conjectured: bool,
}

impl CatalogEntry {
    fn plain(key: &str, description: &str, operator: DiffOperator, pushforward: Polynomial) -> Self {
        CatalogEntry {
            key: key.into(),
            description: description.into(),
            operator: Some(operator),
            pushforward: Some(pushforward),
            noncentral: None,
            table: None,
            conjectured: false,
        }
    }
}

/// Keys accepted by [`catalog`]; parameterised keys take a `:`-separated
/// argument list.
pub const CATALOG_KEYS: &[&str] = &[
    "normal",
    "centered-chi2",
    "h3",
    "h4",
    "quadratic:a,b,c",
    "noncentral-chi2:k,lambda",
    "table1:n",
];

pub fn normal_operator() -> DiffOperator {
    DiffOperator::from_ints(&[&[0, -1], &[1]])
}

pub fn centered_chi2_operator() -> DiffOperator {
    DiffOperator::from_ints(&[&[0, -1], &[2, 2]])
}

/// `486(4-x^2)f^(5) - 486x f^(4) - 27(8-x^2)f^(3) + 99x f'' + 6f' - x f`.
pub fn h3_operator() -> DiffOperator {
    DiffOperator::from_ints(&[&[0, -1], &[6], &[0, 99], &[-216, 0, 27], &[0, -486], &[1944, 0, -486]])
}

/// `192(x+6)(3-x)f^(3) + 16(x+3)(x-12)f'' + 4(11x+6)f' - x f`.
pub fn h4_operator() -> DiffOperator {
    DiffOperator::from_ints(&[&[0, -1], &[24, 44], &[-576, -144, 16], &[3456, -576, -192]])
}

/// Operator for `W = aZ^2 + bZ + c`:
/// `(ab^2 + 4a^2(x-c)) f'' + (2a^2 - b^2 - 4a(x-c)) f' + (x - c - a) f`.
pub fn quadratic_operator(a: &Rational, b: &Rational, c: &Rational) -> DiffOperator {
    let four = Rational::from_int(4);
    let a2 = a * a;
    let b2 = b * b;
    let p2 = Polynomial::from_coeffs(vec![a * &b2 - &four * &a2 * c, &four * &a2]);
    let p1 = Polynomial::from_coeffs(vec![Rational::from_int(2) * &a2 - &b2 + &four * a * c, -(&four * a)]);
    let p0 = Polynomial::from_coeffs(vec![-(c + a), Rational::one()]);
    DiffOperator::new(vec![p0, p1, p2])
}

fn parse_args(key: &str, args: &str, expected: usize) -> Result<Vec<Rational>> {
    let values = args
        .split(',')
        .map(Rational::parse_decimal)
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::InvalidParameters(format!("{key}: {e}")))?;
    if values.len() != expected {
        return Err(Error::InvalidParameters(format!(
            "{key} takes {expected} arguments, got {}",
            values.len()
        )));
    }
    Ok(values)
}

/// Looks up a catalog entry, e.g. `h3`, `quadratic:1,2,1`,
/// `noncentral-chi2:4,3`, `table1:5`.
pub fn catalog(key: &str) -> Result<CatalogEntry> {
    let key = key.trim();
    let (name, args) = match key.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (key, None),
    };
    let no_args = |entry: CatalogEntry| match args {
        None => Ok(entry),
        Some(_) => Err(Error::InvalidParameters(format!("`{name}` takes no arguments"))),
    };
    match name {
        "normal" => no_args(CatalogEntry::plain(
            "normal",
            "standard Gaussian, W = Z",
            normal_operator(),
            Polynomial::x(),
        )),
        "centered-chi2" => no_args(CatalogEntry::plain(
            "centered-chi2",
            "centered chi-square, W = Z^2 - 1",
            centered_chi2_operator(),
            hermite(2),
        )),
        "h3" => no_args(CatalogEntry::plain(
            "h3",
            "third Hermite pushforward, W = Z^3 - 3Z",
            h3_operator(),
            hermite(3),
        )),
        "h4" => no_args(CatalogEntry::plain(
            "h4",
            "fourth Hermite pushforward, W = Z^4 - 6Z^2 + 3",
            h4_operator(),
            hermite(4),
        )),
        "quadratic" => {
            let v = parse_args(name, args.unwrap_or(""), 3)?;
            let (a, b, c) = (&v[0], &v[1], &v[2]);
            Ok(CatalogEntry::plain(
                &format!("quadratic:{a},{b},{c}"),
                "quadratic pushforward, W = aZ^2 + bZ + c",
                quadratic_operator(a, b, c),
                Polynomial::from_coeffs(vec![c.clone(), b.clone(), a.clone()]),
            ))
        }
        "noncentral-chi2" => {
            let v = parse_args(name, args.unwrap_or(""), 2)?;
            let params = NoncentralParams::new(v[0].clone(), v[1].clone())?;
            Ok(CatalogEntry {
                key: format!("noncentral-chi2:{},{}", params.k, params.lambda),
                description: "non-central chi-square with k degrees of freedom and non-centrality lambda".into(),
                operator: Some(params.operator()),
                pushforward: None,
                noncentral: Some(params),
                table: None,
                conjectured: false,
            })
        }
        "table1" => {
            let n: usize = args
                .unwrap_or("")
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameters("table1 takes n in 1..=6".into()))?;
            let row =
                table_row(n).ok_or_else(|| Error::InvalidParameters(format!("table1 has rows 1..=6, not {n}")))?;
            let operator = match n {
                1 => Some(normal_operator()),
                2 => Some(centered_chi2_operator()),
                3 => Some(h3_operator()),
                4 => Some(h4_operator()),
                _ => None,
            };
            Ok(CatalogEntry {
                key: format!("table1:{n}"),
                description: format!("extrema of H_{n} and the highest-order coefficient of its operator"),
                operator,
                pushforward: Some(hermite(n)),
                noncentral: None,
                conjectured: row.conjectured,
                table: Some(row),
            })
        }
        _ => Err(Error::UnknownCatalogKey(key.into())),
    }
}

/// Concrete entries behind [`CATALOG_KEYS`], with the parameter sets used in
/// the test suite.
pub fn catalog_listing() -> Vec<CatalogEntry> {
    [
        "normal",
        "centered-chi2",
        "h3",
        "h4",
        "quadratic:1,0,0",
        "quadratic:1,2,1",
        "quadratic:1,-3,0",
        "noncentral-chi2:1,1",
        "noncentral-chi2:2,1/2",
        "noncentral-chi2:4,3",
        "table1:1",
        "table1:2",
        "table1:3",
        "table1:4",
        "table1:5",
        "table1:6",
    ]
    .iter()
    .map(|k| catalog(k).expect("listed keys are valid"))
    .collect()
}
