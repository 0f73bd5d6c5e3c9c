//! Arithmetic of the twin-prime curve family
//!
//! ```text
//! E^eps_D : y^2 = x (x + eps p D) (x + eps q D),   q = p + 2,
//! ```
//!
//! and its quadratic twists. Every closed-form invariant the library reports
//! (reduction data, point counts, norm indices, root numbers, L-values) comes
//! with an independent route that recomputes it from first principles, so the
//! tables can be audited rather than trusted.
//!
//! Layers, bottom to top: [`arith`], [`curves`], [`localdata`], [`galois`],
//! [`normindex`], [`classgroup`], [`lseries`].

pub mod arith;
pub mod classgroup;
pub mod curves;
mod error;
pub mod galois;
pub mod localdata;
pub mod lseries;
pub mod normindex;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Enumeration limits shared by the brute-force routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budgets {
    /// Largest prime `l` for which points are counted over `F_l`.
    pub prime_enumeration: u64,
    /// Largest `|disc|` for imaginary class groups.
    pub class_group_imaginary: u64,
    /// Largest `disc` for real class groups.
    pub class_group_real: u64,
    /// Largest truncation point of an L-series.
    pub series_truncation: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            prime_enumeration: 100_000,
            class_group_imaginary: 1_000_000,
            class_group_real: 100_000,
            series_truncation: 100_000,
        }
    }
}
