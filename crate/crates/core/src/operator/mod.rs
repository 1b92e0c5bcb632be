//! Polynomial-coefficient differential operators and the operator catalog.

pub mod catalog;
mod diffop;
pub mod extrema;
mod moments;

pub use catalog::{catalog, catalog_listing, CatalogEntry, NoncentralParams, CATALOG_KEYS};
pub use diffop::{DiffOperator, Proportionality};
pub use extrema::{verify_table1_extrema, Radical, TableRow};
pub use moments::moment_recursion;
