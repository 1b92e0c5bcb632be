//! Exact search for operators whose expectation vector lies in the span of
//! the integration-by-parts identities.
//!
//! Order the terms by `j` ascending, then `i` descending. Identity `(k, j)`
//! then has the unique leading term `T(k, j)` with coefficient one, so the
//! identities are independent and one elimination pass over the terms in
//! this order produces a canonical normal form: a vector lies in the span
//! iff its normal form vanishes. Operators with coefficient degrees `<= D`
//! and order `<= M` form a finite-dimensional space; the feasible ones are
//! the kernel of the linear map sending an operator to the normal form of
//! its image.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{linalg, Polynomial, Rational};
use crate::operator::DiffOperator;

use super::terms::{derivative_coeffs, ibp_identity, operator_image, ExpectationVector, TermIndex};

/// Search family and truncation of the term space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchBounds {
    /// Largest derivative order of the operator.
    #[serde(rename = "M")]
    pub max_order: usize,
    /// Largest coefficient degree.
    #[serde(rename = "D")]
    pub max_coeff_degree: usize,
    /// Identities may touch terms `T(i, j)` with `i <= I`.
    #[serde(rename = "I")]
    pub z_power_cap: usize,
    /// Identities may touch terms `T(i, j)` with `j <= J`.
    #[serde(rename = "J")]
    pub derivative_cap: usize,
}

impl SearchBounds {
    /// `J = M`, `I = deg(P) (D + M)`.
    pub fn default_for(deg: usize, max_order: usize, max_coeff_degree: usize) -> Self {
        SearchBounds {
            max_order,
            max_coeff_degree,
            z_power_cap: deg * (max_coeff_degree + max_order),
            derivative_cap: max_order,
        }
    }

    pub fn validate(&self, deg: usize) -> Result<()> {
        if self.derivative_cap < self.max_order {
            return Err(Error::InconsistentBounds(format!(
                "derivative cap J = {} is below the order M = {}",
                self.derivative_cap, self.max_order
            )));
        }
        if self.z_power_cap < deg * self.max_coeff_degree {
            return Err(Error::InconsistentBounds(format!(
                "z-power cap I = {} is below deg(P) * D = {}",
                self.z_power_cap,
                deg * self.max_coeff_degree
            )));
        }
        Ok(())
    }

    /// Successive relaxations: first `I += deg(P) M`, then also `J += 2`.
    pub fn deepened(&self, deg: usize) -> [SearchBounds; 2] {
        let wider = SearchBounds {
            z_power_cap: self.z_power_cap + deg * self.max_order,
            ..*self
        };
        let deeper = SearchBounds {
            derivative_cap: self.derivative_cap + 2,
            ..wider
        };
        [wider, deeper]
    }
}

/// Multipliers `lambda_{k,j}` with `sum lambda_{k,j} identity(k,j) = image`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Certificate {
    pub multipliers: BTreeMap<(usize, usize), Rational>,
}

impl Certificate {
    pub fn combination(&self, p: &Polynomial) -> Result<ExpectationVector> {
        let mut v = ExpectationVector::new();
        for (&(k, j), lambda) in &self.multipliers {
            v.add_scaled(&ibp_identity(k, j, p)?, lambda);
        }
        Ok(v)
    }

    pub fn scale(&self, c: &Rational) -> Certificate {
        Certificate {
            multipliers: self
                .multipliers
                .iter()
                .filter(|_| !c.is_zero())
                .map(|(&t, v)| (t, v * c))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.multipliers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multipliers.is_empty()
    }
}

#[derive(Serialize, Deserialize)]
struct MultiplierJson {
    k: usize,
    j: usize,
    value: Rational,
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    multipliers: Vec<MultiplierJson>,
}

impl Serialize for Certificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CertificateJson {
            multipliers: self
                .multipliers
                .iter()
                .map(|(&(k, j), v)| MultiplierJson { k, j, value: v.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Certificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CertificateJson::deserialize(d)?;
        let mut multipliers = BTreeMap::new();
        for m in raw.multipliers {
            if m.k == 0 {
                return Err(serde::de::Error::custom("identity index k must be >= 1"));
            }
            if !m.value.is_zero() && multipliers.insert((m.k, m.j), m.value).is_some() {
                return Err(serde::de::Error::custom(format!(
                    "duplicate multiplier for identity ({}, {})",
                    m.k, m.j
                )));
            }
        }
        Ok(Certificate { multipliers })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Found,
    InfeasibleAtBounds,
    Degenerate,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Found => "found",
            Status::InfeasibleAtBounds => "infeasible-at-bounds",
            Status::Degenerate => "degenerate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivationResult {
    pub status: Status,
    pub poly: Polynomial,
    pub bounds: SearchBounds,
    pub operator: Option<DiffOperator>,
    pub certificate: Option<Certificate>,
    /// Dimension of the space of feasible operators within the bounds.
    pub nullspace_dim: usize,
    /// Normalized reduced-echelon basis of that space.
    #[serde(default)]
    pub basis: Vec<DiffOperator>,
}

/// Elimination of leading terms, for a fixed `P` and truncation.
pub(crate) struct Reducer {
    c: Vec<Rational>,
    deg: usize,
    max_i: usize,
    max_j: usize,
}

impl Reducer {
    pub(crate) fn new(p: &Polynomial, bounds: &SearchBounds) -> Result<Self> {
        let c = derivative_coeffs(p)?;
        Ok(Reducer {
            deg: c.len(),
            c,
            max_i: bounds.z_power_cap,
            max_j: bounds.derivative_cap,
        })
    }

    /// Identity `(i, j)` only touches terms inside the truncation.
    fn usable(&self, i: usize, j: usize) -> bool {
        i >= 1 && i <= self.max_i && i + self.deg <= self.max_i + 2 && j < self.max_j
    }

    /// Normal form of `v`; eliminated leading coefficients are added to
    /// `multipliers` when given.
    pub(crate) fn reduce(
        &self,
        v: &ExpectationVector,
        mut multipliers: Option<&mut BTreeMap<(usize, usize), Rational>>,
    ) -> ExpectationVector {
        let top_i = v.max_z_power().unwrap_or(0).max(self.max_i) + self.deg;
        let top_j = v.max_derivative().unwrap_or(0).max(self.max_j) + 1;
        let mut grid = vec![vec![Rational::zero(); top_i + 1]; top_j + 1];
        for (t, c) in v.iter() {
            grid[t.j][t.i] = c.clone();
        }
        for j in 0..self.max_j.min(top_j) {
            for i in (1..=top_i).rev() {
                if grid[j][i].is_zero() || !self.usable(i, j) {
                    continue;
                }
                let a = std::mem::replace(&mut grid[j][i], Rational::zero());
                if i >= 2 {
                    let add = &a * Rational::from_int(i as i64 - 1);
                    grid[j][i - 2] += &add;
                }
                for (l, cl) in self.c.iter().enumerate() {
                    if !cl.is_zero() {
                        grid[j + 1][i - 1 + l] += &(&a * cl);
                    }
                }
                if let Some(m) = multipliers.as_deref_mut() {
                    let slot = m.entry((i, j)).or_insert_with(Rational::zero);
                    *slot += &a;
                    if slot.is_zero() {
                        m.remove(&(i, j));
                    }
                }
            }
        }
        let mut out = ExpectationVector::new();
        for (j, row) in grid.into_iter().enumerate() {
            for (i, c) in row.into_iter().enumerate() {
                out.add_term(TermIndex::new(i, j), &c);
            }
        }
        out
    }
}

/// Image of the unit operator `x^d f^(m)`.
fn unit_image(powers: &[Polynomial], m: usize, d: usize) -> ExpectationVector {
    ExpectationVector::from_terms(powers[d].coeffs().iter().enumerate().map(|(i, a)| ((i, m), a.clone())))
}

fn operator_from_vector(q: &[Rational], bounds: &SearchBounds) -> DiffOperator {
    let width = bounds.max_coeff_degree + 1;
    DiffOperator::new(q.chunks(width).map(|c| Polynomial::from_coeffs(c.to_vec())).collect())
}

fn support(v: &[Rational]) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, _)| i)
        .collect()
}

fn degenerate_result(p: &Polynomial, bounds: SearchBounds) -> DerivationResult {
    let c = p.coeff(0);
    DerivationResult {
        status: Status::Degenerate,
        poly: p.clone(),
        bounds,
        operator: Some(DiffOperator::new(vec![Polynomial::from_coeffs(vec![
            -c,
            Rational::one(),
        ])])),
        certificate: None,
        nullspace_dim: 0,
        basis: vec![],
    }
}

/// One exact feasibility solve at fixed bounds.
pub fn derive_at_bounds(p: &Polynomial, bounds: SearchBounds) -> Result<DerivationResult> {
    let deg = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => return Ok(degenerate_result(p, bounds)),
    };
    bounds.validate(deg)?;
    let reducer = Reducer::new(p, &bounds)?;
    let (mm, dd) = (bounds.max_order, bounds.max_coeff_degree);
    let mut powers = vec![Polynomial::one()];
    for _ in 0..dd {
        let next = powers.last().unwrap() * p;
        powers.push(next);
    }

    let forms: Vec<ExpectationVector> = (0..=mm)
        .flat_map(|m| (0..=dd).map(move |d| (m, d)))
        .map(|(m, d)| reducer.reduce(&unit_image(&powers, m, d), None))
        .collect();
    let terms: BTreeSet<TermIndex> = forms.iter().flat_map(|f| f.iter().map(|(t, _)| *t)).collect();
    let rows: Vec<Vec<Rational>> = terms
        .iter()
        .map(|t| forms.iter().map(|f| f.get(t.i, t.j)).collect())
        .collect();
    let ncols = forms.len();
    let kernel = linalg::nullspace(&rows, ncols);
    let (canonical, _) = linalg::rref(&kernel, ncols);

    if canonical.is_empty() {
        return Ok(DerivationResult {
            status: Status::InfeasibleAtBounds,
            poly: p.clone(),
            bounds,
            operator: None,
            certificate: None,
            nullspace_dim: 0,
            basis: vec![],
        });
    }

    let basis = canonical
        .iter()
        .map(|q| operator_from_vector(q, &bounds).normalize())
        .collect::<Result<Vec<_>>>()?;
    let chosen = canonical
        .iter()
        .enumerate()
        .min_by(|a, b| support(a.1).cmp(&support(b.1)))
        .map(|(i, _)| i)
        .expect("nonempty basis");
    let operator = basis[chosen].clone();

    let mut multipliers = BTreeMap::new();
    let rest = reducer.reduce(&operator_image(&operator, p), Some(&mut multipliers));
    if !rest.is_zero() {
        return Err(Error::Internal(format!(
            "kernel operator {operator} has nonzero normal form {rest}"
        )));
    }
    Ok(DerivationResult {
        status: Status::Found,
        poly: p.clone(),
        bounds,
        operator: Some(operator),
        certificate: Some(Certificate { multipliers }),
        nullspace_dim: canonical.len(),
        basis,
    })
}

/// Exact search at `bounds`; with `deepen`, two relaxed truncations are
/// tried before reporting infeasibility.
pub fn derive_operator(p: &Polynomial, bounds: SearchBounds, deepen: bool) -> Result<DerivationResult> {
    let mut result = derive_at_bounds(p, bounds)?;
    if !deepen || result.status != Status::InfeasibleAtBounds {
        return Ok(result);
    }
    let deg = p.degree().expect("non-degenerate");
    for b in bounds.deepened(deg) {
        result = derive_at_bounds(p, b)?;
        if result.status == Status::Found {
            break;
        }
    }
    Ok(result)
}

/// Default truncation for `(M, D)` with deepening.
pub fn derive_default(p: &Polynomial, max_order: usize, max_coeff_degree: usize) -> Result<DerivationResult> {
    let deg = p.degree().unwrap_or(0);
    derive_operator(p, SearchBounds::default_for(deg, max_order, max_coeff_degree), true)
}

/// Whether `sum lambda identity = operator_image(op, p)` holds exactly.
pub fn certificate_proves(op: &DiffOperator, certificate: &Certificate, p: &Polynomial) -> bool {
    if op.is_zero() {
        return false;
    }
    match certificate.combination(p) {
        Ok(v) => v == operator_image(op, p),
        Err(_) => false,
    }
}

/// Exact replay of a found result's certificate.
pub fn verify_certificate(result: &DerivationResult, p: &Polynomial) -> bool {
    match (&result.status, &result.operator, &result.certificate) {
        (Status::Found, Some(op), Some(cert)) => certificate_proves(op, cert, p),
        _ => false,
    }
}
