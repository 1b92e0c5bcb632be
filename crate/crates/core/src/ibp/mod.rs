//! Expectation vectors over the terms `T(i, j) = E[Z^i f^(j)(P(Z))]`, the
//! integration-by-parts identities among them, and the exact search for
//! operators whose image lies in their span.

pub mod conjecture;
pub mod scan;
pub mod search;
pub mod terms;

pub use conjecture::{conjecture_run, suspected_min_order, Comparison, ConjectureReport};
pub use scan::{leading_coefficient_report, minimal_scan, LeadingCoefficientReport, ScanCell, ScanResult};
pub use search::{
    certificate_proves, derive_at_bounds, derive_default, derive_operator, verify_certificate, Certificate,
    DerivationResult, SearchBounds, Status,
};
pub use terms::{ibp_identity, operator_image, ExpectationVector, TermIndex};
