//! Tags recording how each reported number was obtained.

use serde::{Deserialize, Serialize};

/// Read off a closed-form congruence table.
pub const TABLE: &str = "closed-form-table";
/// Recomputed by exhaustive enumeration over a finite field or residue ring.
pub const BRUTE_FORCE: &str = "computed-bruteforce";
/// Produced by the general Tate algorithm on the Weierstrass model.
pub const TATE: &str = "tate-algorithm";
/// Product of local factors.
pub const LOCAL_PRODUCT: &str = "local-product";
/// Direct evaluation of a defining formula.
pub const DEFINITION: &str = "definition";
/// Truncated Dirichlet series with an explicit tail bound.
pub const SERIES: &str = "series-truncation";
/// A rank value taken from the literature, not computed here.
pub const IMPORTED: &str = "imported-rank-fact";
/// Sum of local norm-index components.
pub const COMPONENTS: &str = "local-components";
/// Form enumeration and composition.
pub const FORMS: &str = "form-enumeration";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tagged<T> {
    pub value: T,
    pub source: String,
}

pub fn tag<T>(value: T, source: &str) -> Tagged<T> {
    Tagged { value, source: source.to_string() }
}
