//! Minimal-order search for `H_5` and `H_6`, compared against the tabulated
//! leading coefficients.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::Polynomial;
use crate::gaussian::hermite;
use crate::operator::extrema::table_row;
use crate::verify::{verify_pushforward, Method, VerificationReport, VerifyOptions};

use super::scan::{leading_coefficient_report, minimal_scan, LeadingCoefficientReport, ScanResult};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub label: String,
    pub polynomial: Polynomial,
    /// Absent when no operator was found.
    pub report: Option<LeadingCoefficientReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub hermite: usize,
    pub max_order: usize,
    pub max_degree: usize,
    /// Order below which no operator is expected.
    pub suspected_min_order: usize,
    /// True iff no cell with order `< suspected_min_order` was found; this
    /// is evidence within the searched degrees, not a proof.
    pub consistent_with_suspected_order: bool,
    pub scan: ScanResult,
    pub comparisons: Vec<Comparison>,
    /// Symbolic, quadrature and Monte Carlo checks of the found operator.
    pub verification: Option<VerificationReport>,
}

/// Smallest order the tabulated data suggests for `H_n`, `n in {5, 6}`.
pub fn suspected_min_order(n: usize) -> Option<usize> {
    match n {
        5 => Some(9),
        6 => Some(6),
        _ => None,
    }
}

/// Scans `H_n` and reports the minimal operator, its verification and its
/// comparison with the tabulated top coefficients. The report is produced
/// whether or not an operator is found.
pub fn conjecture_run(n: usize, max_order: usize, max_degree: usize) -> Result<ConjectureReport> {
    let suspected = suspected_min_order(n)
        .ok_or_else(|| Error::InvalidParameters(format!("conjecture runs cover H_5 and H_6, got H_{n}")))?;
    let row = table_row(n).ok_or_else(|| Error::Internal(format!("no table row for H_{n}")))?;
    let p = hermite(n);
    let scan = minimal_scan(&p, max_order, max_degree)?;

    let mut targets = vec![("tabulated".to_string(), row.leading_coefficient.clone())];
    if let Some(c) = &row.corrected_leading_coefficient {
        targets.push(("extremal-product".to_string(), c.clone()));
    }
    let comparisons = targets
        .into_iter()
        .map(|(label, polynomial)| {
            let report = match &scan.minimal {
                Some(r) => Some(leading_coefficient_report(r, &polynomial)?),
                None => None,
            };
            Ok(Comparison {
                label,
                polynomial,
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let verification = match scan.minimal.as_ref().and_then(|r| r.operator.as_ref()) {
        Some(op) => {
            let opts = VerifyOptions {
                methods: vec![Method::Symbolic, Method::Quadrature, Method::MonteCarlo],
                ..VerifyOptions::default()
            };
            Some(verify_pushforward(op, &p, &opts)?)
        }
        None => None,
    };

    Ok(ConjectureReport {
        hermite: n,
        max_order,
        max_degree,
        suspected_min_order: suspected,
        consistent_with_suspected_order: !scan.found_at_or_below(suspected - 1),
        scan,
        comparisons,
        verification,
    })
}
