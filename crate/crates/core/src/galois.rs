//! Mod-l Galois representation predicates: ramification of `E_D[l]` at the
//! multiplicative primes and sufficient conditions for surjectivity.

use serde::{Deserialize, Serialize};

use crate::arith::is_prime_u64;
use crate::curves::CurveSpec;
use crate::error::{Error, Result};
use crate::localdata::reduction_data;

/// Serre's bound `(sqrt 3 + 1)^8` is below this.
pub const LARGE_PRIME_BOUND: u64 = 3105;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamificationVerdict {
    pub l: u64,
    pub at: u64,
    pub ramified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Surjectivity {
    Surjective,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurjectivityVerdict {
    pub l: u64,
    pub status: Surjectivity,
    /// Which sufficient condition fired, if any.
    pub reason: Option<String>,
}

/// Whether `E_D[l]` is ramified at `at`, one of the primes exactly dividing
/// the conductor.
///
/// For `l != at` this uses the criterion "ramified iff `l` does not divide
/// `ord_at(Delta_min)`", with the valuation read off the reduction data. For
/// `l = at` the criterion does not apply and the verdict is "unramified".
pub fn torsion_ramified_at(spec: &CurveSpec, l: u64, at: u64) -> Result<RamificationVerdict> {
    if at != spec.p && at != spec.q {
        return Err(Error::Domain(format!(
            "{at} is not a multiplicative prime of this curve (expected {} or {})",
            spec.p, spec.q
        )));
    }
    if !is_prime_u64(l) {
        return Err(Error::Domain(format!("{l} is not prime")));
    }
    let ramified = if l == at {
        false
    } else {
        let ord = reduction_data(spec, at)?.disc_valuation as u64;
        !ord.is_multiple_of(l)
    };
    Ok(RamificationVerdict { l, at, ramified })
}

/// Closed form of [`torsion_ramified_at`]: `l > 2` and `l != at`.
pub fn torsion_ramified_closed_form(l: u64, at: u64) -> bool {
    l > 2 && l != at
}

pub fn rho_surjective(spec: &CurveSpec, l: u64) -> Result<SurjectivityVerdict> {
    if !is_prime_u64(l) {
        return Err(Error::Domain(format!("{l} is not prime")));
    }
    let bad = |x: u64| x == spec.p || x == spec.q || spec.d.primes().any(|y| y == x);
    let reason = if l == 3 && !bad(3) {
        Some("l = 3, 3 does not divide pqD (supersingular at 3, discriminant not a cube)")
    } else if l == 7 && !bad(7) && matches!(spec.p % 7, 2 | 3 | 6) {
        Some("l = 7, 7 does not divide pqD, p = 2, 3, 6 mod 7 (supersingular at 7, ord_p j = -2)")
    } else if l > LARGE_PRIME_BOUND && !bad(3) && !bad(l) {
        Some("l > 3105, l and 3 do not divide pqD (semistable-type bound)")
    } else {
        None
    };
    Ok(SurjectivityVerdict {
        l,
        status: if reason.is_some() { Surjectivity::Surjective } else { Surjectivity::Unknown },
        reason: reason.map(str::to_string),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{primes_up_to, twin_pairs_below};

    fn spec(e: i64, p: u64, d: i128) -> CurveSpec {
        CurveSpec::validate(e, p, p + 2, d).unwrap()
    }

    #[test]
    fn ramification_examples() {
        let s = spec(1, 11, 1);
        assert!(torsion_ramified_at(&s, 3, 11).unwrap().ramified);
        assert!(!torsion_ramified_at(&s, 2, 11).unwrap().ramified);
        assert!(torsion_ramified_at(&s, 11, 13).unwrap().ramified);
        assert!(torsion_ramified_at(&s, 13, 11).unwrap().ramified);
        assert!(!torsion_ramified_at(&s, 11, 11).unwrap().ramified);
        assert!(torsion_ramified_at(&s, 3, 7).is_err());
    }

    #[test]
    fn derivation_matches_closed_form() {
        for (p, q) in twin_pairs_below(100) {
            for d in [1i128, 5, -7] {
                let Ok(s) = CurveSpec::validate(-1, p, q, d) else { continue };
                for l in primes_up_to(50) {
                    for at in [p, q] {
                        let v = torsion_ramified_at(&s, l, at).unwrap();
                        assert_eq!(v.ramified, torsion_ramified_closed_form(l, at), "l={l} at={at}");
                    }
                }
            }
        }
    }

    #[test]
    fn surjectivity_examples() {
        let v = rho_surjective(&spec(1, 5, 1), 3).unwrap();
        assert_eq!(v.status, Surjectivity::Surjective);
        assert_eq!(rho_surjective(&spec(1, 3, 1), 3).unwrap().status, Surjectivity::Unknown);
        assert!(is_prime_u64(3109));
        assert_eq!(rho_surjective(&spec(1, 5, 1), 3109).unwrap().status, Surjectivity::Surjective);
        // 3103 = 29 * 107
        assert!(rho_surjective(&spec(1, 5, 1), 3103).is_err());
        // p = 17 = 3 mod 7
        assert_eq!(rho_surjective(&spec(1, 17, 1), 7).unwrap().status, Surjectivity::Surjective);
        assert_eq!(rho_surjective(&spec(1, 11, 1), 7).unwrap().status, Surjectivity::Unknown);
    }

    #[test]
    fn large_prime_clause_is_monotone() {
        let big: Vec<u64> = primes_up_to(4000).into_iter().filter(|&l| l > 3000).collect();
        for (p, q) in twin_pairs_below(60) {
            let s = spec(1, p, 1);
            let mut seen = false;
            for &l in &big {
                let sur = rho_surjective(&s, l).unwrap().status == Surjectivity::Surjective;
                if seen && l != p && l != q {
                    assert!(sur, "p={p} l={l}");
                }
                seen |= sur && l > LARGE_PRIME_BOUND;
            }
        }
    }
}
