//! Feasibility over a grid of `(order, degree)` families.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{Polynomial, Rational};

use super::search::{derive_default, DerivationResult, SearchBounds, Status};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanCell {
    pub order: usize,
    pub degree: usize,
    pub status: Status,
    pub nullspace_dim: usize,
    /// Bounds of the last solve, after any deepening.
    pub bounds: SearchBounds,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanResult {
    pub poly: Polynomial,
    pub max_order: usize,
    pub max_degree: usize,
    /// Cells with `1 <= order <= max_order`, `0 <= degree <= max_degree`,
    /// sorted by order then degree.
    pub grid: Vec<ScanCell>,
    /// First found cell in that order.
    pub minimal: Option<DerivationResult>,
    /// Top coefficient of the minimal operator, primitive with positive
    /// leading coefficient.
    pub leading_coefficient: Option<Polynomial>,
}

impl ScanResult {
    pub fn minimal_cell(&self) -> Option<(usize, usize)> {
        self.minimal
            .as_ref()
            .map(|r| (r.bounds.max_order, r.bounds.max_coeff_degree))
    }

    pub fn all_infeasible(&self) -> bool {
        self.grid.iter().all(|c| c.status == Status::InfeasibleAtBounds)
    }

    pub fn found_at_or_below(&self, order: usize) -> bool {
        self.grid.iter().any(|c| c.order <= order && c.status == Status::Found)
    }
}

/// Solves every cell with default caps and deepening. Cells are independent
/// and may run concurrently; the result does not depend on scheduling.
pub fn minimal_scan(p: &Polynomial, max_order: usize, max_degree: usize) -> Result<ScanResult> {
    if p.degree().is_none_or(|d| d == 0) {
        return Err(Error::DegeneratePushforward);
    }
    let cells: Vec<(usize, usize)> = (1..=max_order)
        .flat_map(|m| (0..=max_degree).map(move |d| (m, d)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(m, d)| derive_default(p, m, d))
        .collect::<Result<Vec<_>>>()?;
    let grid = cells
        .iter()
        .zip(&results)
        .map(|(&(order, degree), r)| ScanCell {
            order,
            degree,
            status: r.status,
            nullspace_dim: r.nullspace_dim,
            bounds: r.bounds,
        })
        .collect();
    let minimal = results.into_iter().find(|r| r.status == Status::Found);
    let leading_coefficient = minimal
        .as_ref()
        .and_then(|r| r.operator.as_ref())
        .and_then(|op| op.leading())
        .map(|c| c.primitive());
    Ok(ScanResult {
        poly: p.clone(),
        max_order,
        max_degree,
        grid,
        minimal,
        leading_coefficient,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeadingCoefficientReport {
    pub proportional: bool,
    /// `r` with `top coefficient = r * conjecture`.
    pub ratio: Option<Rational>,
}

/// Whether the top coefficient of a found operator is a nonzero rational
/// multiple of `conjecture`.
pub fn leading_coefficient_report(
    result: &DerivationResult,
    conjecture: &Polynomial,
) -> Result<LeadingCoefficientReport> {
    if conjecture.is_zero() {
        return Err(Error::ZeroConjecture);
    }
    let op = match (&result.status, &result.operator) {
        (Status::Found, Some(op)) => op,
        (s, _) => return Err(Error::NotFound(s.as_str())),
    };
    let top = op.leading().ok_or(Error::ZeroOperator)?;
    let ratio = top.ratio_to(conjecture);
    Ok(LeadingCoefficientReport {
        proportional: ratio.is_some(),
        ratio,
    })
}
