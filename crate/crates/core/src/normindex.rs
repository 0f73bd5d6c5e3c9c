//! Local norm indices of `E = E^eps_1` over `K = Q(sqrt(mu D))`.
//!
//! `delta(E, Q, K)` is assembled from its components
//! `delta_inf + delta_g + delta_m + delta_a` and, separately, read off an
//! eighteen-row classification table keyed by `mu D mod 8`, `p mod 4` and the
//! pair of symbols `((mu D / p), (mu D / q))`. The two must agree.

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, jacobi_unchecked, FactoredInteger};
use crate::curves::CurveSpec;
use crate::error::{Error, Result};
use crate::localdata::{reduction_data, Kodaira};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistField {
    pub mu: i8,
    /// Positive square-free odd `D`.
    pub d: FactoredInteger,
    pub mu0: u8,
    /// Discriminant of `Q(sqrt(mu D))`.
    pub disc: i128,
}

impl TwistField {
    pub fn new(mu: i64, d: i128) -> Result<Self> {
        if mu != 1 && mu != -1 {
            return Err(Error::Domain(format!("mu must be 1 or -1, got {mu}")));
        }
        if d < 1 {
            return Err(Error::Domain(format!("D must be positive (the sign lives in mu), got {d}")));
        }
        if mu == 1 && d == 1 {
            return Err(Error::Domain("mu D = 1 gives Q, not a quadratic field".into()));
        }
        if d % 2 == 0 {
            return Err(Error::Twist(format!("D = {d} is even")));
        }
        let f = FactoredInteger::from_i128(d)?;
        if !f.is_squarefree() {
            return Err(Error::Twist(format!("D = {d} is not square-free")));
        }
        let md = mu as i128 * d;
        Ok(TwistField {
            mu: mu as i8,
            d: f,
            mu0: ((1 - mu) / 2) as u8,
            disc: if md.rem_euclid(4) == 1 { md } else { 4 * md },
        })
    }

    pub fn d_value(&self) -> i128 {
        self.d.value().expect("validated D fits in i128")
    }

    /// `mu D`.
    pub fn md(&self) -> i128 {
        self.mu as i128 * self.d_value()
    }

    /// `mu D mod 8`, one of 1, 3, 5, 7.
    pub fn residue8(&self) -> u8 {
        self.md().rem_euclid(8) as u8
    }

    pub fn n(&self) -> u32 {
        self.d.num_primes() as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwoAdicField {
    /// `Q_2(sqrt -3)`, unramified.
    SqrtMinus3,
    /// `Q_2(sqrt -1)`.
    SqrtMinus1,
    /// `Q_2(sqrt 3)`.
    Sqrt3,
}

impl TwoAdicField {
    /// Residue degree over `Q_2`.
    pub fn residue_degree(self) -> u32 {
        match self {
            TwoAdicField::SqrtMinus3 => 2,
            _ => 1,
        }
    }
}

/// Data of `E` over the completion `K_w` at the place above 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoAdicLocalData {
    pub field: TwoAdicField,
    pub kodaira_w: Kodaira,
    pub ord_disc_w: u32,
    pub f_w: u32,
    pub c_w: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormIndexBreakdown {
    pub delta_inf: u32,
    pub delta_g: u32,
    pub delta_m: u32,
    pub delta_a: u32,
    pub total: u32,
    pub case_label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaCase {
    pub label: String,
    pub total: u32,
}

/// `rank E(K) = beta + dim Sha(E/K)[2] mod 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityRelation {
    pub beta: u8,
    pub clause: String,
}

/// `dim Sel_2(E_{mu D}/Q) = s + dim Sel_2(E/Q) mod 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelmerParityShift {
    pub s: u8,
    pub clause: String,
}

/// Symbol pattern of `((mu D / p), (mu D / q))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pattern {
    BothPlus,
    Mixed,
    BothMinus,
    /// The two symbols are equal (either sign).
    Equal,
}

impl Pattern {
    fn matches(self, a: i8, b: i8) -> bool {
        match self {
            Pattern::BothPlus => a == 1 && b == 1,
            Pattern::BothMinus => a == -1 && b == -1,
            Pattern::Mixed => a + b == 0,
            Pattern::Equal => a == b,
        }
    }
}

struct Clause {
    label: &'static str,
    residue: u8,
    p_mod4: Option<u64>,
    pattern: Pattern,
    /// `delta - 2n - mu0`, or the parity group for the parity table.
    value: u32,
}

const fn cl(label: &'static str, residue: u8, p_mod4: Option<u64>, pattern: Pattern, value: u32) -> Clause {
    Clause { label, residue, p_mod4, pattern, value }
}

use Pattern::{BothMinus, BothPlus, Equal, Mixed};

const DELTA_CLAUSES: [Clause; 18] = [
    cl("1", 1, None, BothPlus, 0),
    cl("2a", 5, None, BothPlus, 1),
    cl("2b", 7, Some(3), BothPlus, 1),
    cl("2c", 3, Some(1), BothPlus, 1),
    cl("2d", 1, None, Mixed, 1),
    cl("3a", 7, Some(1), BothPlus, 2),
    cl("3b", 3, Some(3), BothPlus, 2),
    cl("3c", 5, None, Mixed, 2),
    cl("3d", 7, Some(3), Mixed, 2),
    cl("3e", 3, Some(1), Mixed, 2),
    cl("3f", 1, None, BothMinus, 2),
    cl("4a", 7, Some(1), Mixed, 3),
    cl("4b", 3, Some(3), Mixed, 3),
    cl("4c", 5, None, BothMinus, 3),
    cl("4d", 7, Some(3), BothMinus, 3),
    cl("4e", 3, Some(1), BothMinus, 3),
    cl("5a", 7, Some(1), BothMinus, 4),
    cl("5b", 3, Some(3), BothMinus, 4),
];

/// Parity classification; `value` is 0 for "rank = mu0 + dim Sha" and 1 for
/// "rank = mu0 + 1 + dim Sha".
const PARITY_CLAUSES: [Clause; 12] = [
    cl("1a", 1, None, Equal, 0),
    cl("1b", 3, Some(3), Equal, 0),
    cl("1c", 3, Some(1), Mixed, 0),
    cl("1d", 5, None, Mixed, 0),
    cl("1e", 7, Some(1), Equal, 0),
    cl("1f", 7, Some(3), Mixed, 0),
    cl("2a", 1, None, Mixed, 1),
    cl("2b", 3, Some(1), Equal, 1),
    cl("2c", 3, Some(3), Mixed, 1),
    cl("2d", 5, None, Equal, 1),
    cl("2e", 7, Some(3), Equal, 1),
    cl("2f", 7, Some(1), Mixed, 1),
];

fn check_inputs(spec: &CurveSpec, field: &TwistField) -> Result<()> {
    if !spec.is_base() {
        return Err(Error::Domain("norm indices are computed for the D = 1 curve".into()));
    }
    let pq = (spec.p * spec.q) as i128;
    if gcd(field.d_value(), 2 * pq) != 1 {
        return Err(Error::Twist(format!("D = {} is not coprime to 2pq", field.d_value())));
    }
    Ok(())
}

fn symbols(spec: &CurveSpec, field: &TwistField) -> (i8, i8) {
    let md = field.md();
    (jacobi_unchecked(md, spec.p as i128), jacobi_unchecked(md, spec.q as i128))
}

fn matching<'a>(table: &'a [Clause], spec: &CurveSpec, field: &TwistField) -> Result<&'a Clause> {
    let (sp, sq) = symbols(spec, field);
    let r = field.residue8();
    let hits: Vec<&Clause> = table
        .iter()
        .filter(|c| c.residue == r)
        .filter(|c| c.p_mod4.is_none_or(|m| spec.p % 4 == m))
        .filter(|c| c.pattern.matches(sp, sq))
        .collect();
    match hits.as_slice() {
        [one] => Ok(one),
        _ => Err(Error::Inconsistent(format!(
            "{} classification rows match (p = {}, mu D = {})",
            hits.len(),
            spec.p,
            field.md()
        ))),
    }
}

/// Data of `E` over `K_w`, `w | 2`, when 2 does not split in `K`.
pub fn two_adic_data(spec: &CurveSpec, field: &TwistField) -> Result<TwoAdicLocalData> {
    check_inputs(spec, field)?;
    let p1 = spec.p % 4 == 1;
    let row = |field, kodaira_w, ord_disc_w, f_w, c_w| {
        Ok(TwoAdicLocalData { field, kodaira_w, ord_disc_w, f_w, c_w })
    };
    match field.residue8() {
        5 => row(TwoAdicField::SqrtMinus3, Kodaira::III, 6, 5, 2),
        7 => row(TwoAdicField::SqrtMinus1, Kodaira::IStar(2), 12, 6, if p1 { 2 } else { 4 }),
        3 => row(TwoAdicField::Sqrt3, Kodaira::IStar(2), 12, 6, if p1 { 4 } else { 2 }),
        _ => Err(Error::Domain(format!(
            "mu D = {} is 1 mod 8: no additive place above 2",
            field.md()
        ))),
    }
}

/// Local norm index at 2 from the Tamagawa/discriminant formula
///
/// ```text
/// delta_2 = log2( c_2 c_{D,2} / c_w * ( |Delta_2 Delta_{D,2} d^-6|_2 / |Delta_w|_w )^(1/12) ).
/// ```
pub fn delta_two_formula(spec: &CurveSpec, field: &TwistField) -> Result<u32> {
    let w = two_adic_data(spec, field)?;
    let twisted = CurveSpec::validate(spec.epsilon as i64, spec.p, spec.q, field.md())?;
    let e2 = reduction_data(spec, 2)?;
    let ed2 = reduction_data(&twisted, 2)?;
    let log2 = |c: u32| -> Result<i64> {
        if c.is_power_of_two() {
            Ok(c.trailing_zeros() as i64)
        } else {
            Err(Error::Inconsistent(format!("Tamagawa number {c} at 2 is not a power of 2")))
        }
    };
    let vd = crate::arith::val(field.disc, 2) as i64;
    // log2 of the bracketed norm ratio
    let num = -(e2.disc_valuation as i64 + ed2.disc_valuation as i64 - 6 * vd);
    let den = -((w.field.residue_degree() * w.ord_disc_w) as i64);
    let ratio = num - den;
    if ratio % 12 != 0 {
        return Err(Error::Inconsistent(format!("norm ratio 2^{ratio} has no integral 12th root")));
    }
    let delta = log2(e2.tamagawa)? + log2(ed2.tamagawa)? - log2(w.c_w)? + ratio / 12;
    u32::try_from(delta).map_err(|_| Error::Inconsistent(format!("negative delta_2 = {delta}")))
}

/// Closed values of `delta_2` by residue of `mu D` and `p mod 4`.
pub fn delta_two_closed(residue: u8, p: u64) -> Option<u32> {
    let p1 = p % 4 == 1;
    match residue {
        5 => Some(1),
        7 => Some(if p1 { 2 } else { 1 }),
        3 => Some(if p1 { 1 } else { 2 }),
        _ => None,
    }
}

pub fn delta_components(spec: &CurveSpec, field: &TwistField) -> Result<NormIndexBreakdown> {
    check_inputs(spec, field)?;
    let n = field.n();
    let (sp, sq) = symbols(spec, field);
    let delta_inf = field.mu0 as u32;
    let delta_g = 2 * n;
    let delta_m = [sp, sq].iter().filter(|&&s| s == -1).count() as u32;
    let delta_a = if field.residue8() == 1 {
        0
    } else {
        let formula = delta_two_formula(spec, field)?;
        let closed = delta_two_closed(field.residue8(), spec.p);
        if Some(formula) != closed {
            return Err(Error::Inconsistent(format!(
                "delta_2 formula gives {formula}, closed table gives {closed:?}"
            )));
        }
        formula
    };
    let total = delta_inf + delta_g + delta_m + delta_a;
    let label = matching(&DELTA_CLAUSES, spec, field)?.label.to_string();
    let lo = 2 * n + field.mu0 as u32;
    if total < lo || total > lo + 4 {
        return Err(Error::Inconsistent(format!("delta = {total} outside [{lo}, {}]", lo + 4)));
    }
    Ok(NormIndexBreakdown { delta_inf, delta_g, delta_m, delta_a, total, case_label: label })
}

/// The classification row and the total it implies.
pub fn delta_case(spec: &CurveSpec, field: &TwistField) -> Result<DeltaCase> {
    check_inputs(spec, field)?;
    let c = matching(&DELTA_CLAUSES, spec, field)?;
    Ok(DeltaCase {
        label: c.label.to_string(),
        total: 2 * field.n() + field.mu0 as u32 + c.value,
    })
}

/// Number of classification rows matching; 1 on every valid input.
pub fn delta_case_match_count(spec: &CurveSpec, field: &TwistField) -> usize {
    let (sp, sq) = symbols(spec, field);
    let r = field.residue8();
    DELTA_CLAUSES
        .iter()
        .filter(|c| c.residue == r && c.p_mod4.is_none_or(|m| spec.p % 4 == m) && c.pattern.matches(sp, sq))
        .count()
}

pub fn parity_relation(spec: &CurveSpec, field: &TwistField) -> Result<ParityRelation> {
    let total = delta_components(spec, field)?.total;
    let beta = (total % 2) as u8;
    let c = matching(&PARITY_CLAUSES, spec, field)?;
    if (field.mu0 as u32 + c.value) % 2 != beta as u32 {
        return Err(Error::Inconsistent(format!(
            "parity row {} disagrees with delta = {total}",
            c.label
        )));
    }
    Ok(ParityRelation { beta, clause: c.label.to_string() })
}

pub fn selmer_parity_shift(spec: &CurveSpec, field: &TwistField) -> Result<SelmerParityShift> {
    let r = parity_relation(spec, field)?;
    Ok(SelmerParityShift { s: r.beta, clause: r.clause })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{legendre, twin_pairs_below};

    fn base(p: u64) -> CurveSpec {
        CurveSpec::validate(1, p, p + 2, 1).unwrap()
    }

    fn field(mu: i64, d: i128) -> TwistField {
        TwistField::new(mu, d).unwrap()
    }

    /// Quadratic residuosity by listing squares.
    fn qr(a: i128, p: u64) -> i8 {
        let r = a.rem_euclid(p as i128);
        if r == 0 {
            0
        } else if (1..p as i128).any(|x| x * x % p as i128 == r) {
            1
        } else {
            -1
        }
    }

    fn squarefree_odd(d: i128) -> bool {
        d % 2 == 1 && (3..).step_by(2).take_while(|k: &i128| k * k <= d).all(|k| d % (k * k) != 0)
    }

    #[test]
    fn twist_field_discriminants() {
        assert_eq!(field(1, 5).disc, 5);
        assert_eq!(field(1, 7).disc, 28);
        assert_eq!(field(-1, 7).disc, -7);
        assert_eq!(field(-1, 1).disc, -4);
        assert_eq!(field(-1, 5).mu0, 1);
        assert!(matches!(TwistField::new(1, 1), Err(Error::Domain(_))));
        assert!(TwistField::new(1, 9).is_err());
        assert!(TwistField::new(1, -5).is_err());
    }

    #[test]
    fn two_adic_examples() {
        assert_eq!(two_adic_data(&base(11), &field(1, 5)).unwrap().c_w, 2);
        assert_eq!(two_adic_data(&base(17), &field(1, 7)).unwrap().c_w, 2);
        assert_eq!(two_adic_data(&base(29), &field(1, 11)).unwrap().c_w, 4);
        assert!(matches!(two_adic_data(&base(11), &field(1, 17)), Err(Error::Domain(_))));
    }

    #[test]
    fn component_examples() {
        let b = delta_components(&base(3), &field(1, 73)).unwrap();
        assert_eq!((qr(73, 3), qr(73, 5)), (1, -1));
        assert_eq!((b.delta_g, b.delta_m, b.delta_a, b.total), (2, 1, 0, 3));

        let b = delta_components(&base(11), &field(1, 5)).unwrap();
        assert_eq!((qr(5, 11), qr(5, 13)), (1, -1));
        assert_eq!((b.delta_g, b.delta_m, b.delta_a, b.total), (2, 1, 1, 4));

        let b = delta_components(&base(3), &field(-1, 7)).unwrap();
        assert_eq!((qr(-7, 3), qr(-7, 5)), (-1, -1));
        assert_eq!((b.delta_inf, b.delta_g, b.delta_m, b.delta_a, b.total), (1, 2, 2, 0, 5));
    }

    #[test]
    fn case_examples() {
        // D = 17 = 1 mod 8 with (17/p) = (17/q) = 1 needs p, q squares mod 17 ...
        let (p, _) = twin_pairs_below(2000)
            .into_iter()
            .find(|&(p, q)| p != 17 && q != 17 && legendre(17, p) == 1 && legendre(17, q) == 1)
            .unwrap();
        let c = delta_case(&base(p), &field(1, 17)).unwrap();
        assert_eq!((c.label.as_str(), c.total), ("1", 2));

        let c = delta_case(&base(11), &field(1, 5)).unwrap();
        assert_eq!((c.label.as_str(), c.total), ("3c", 4));

        // D = 3 mod 8, p = 3 mod 4, both symbols -1.
        let mut found = false;
        for (p, q) in twin_pairs_below(500).into_iter().filter(|&(p, _)| p % 4 == 3) {
            for d in [11i128, 19, 43, 59, 67, 83] {
                if gcd(d, (p * q) as i128) == 1 && legendre(d, p) == -1 && legendre(d, q) == -1 {
                    let c = delta_case(&base(p), &field(1, d)).unwrap();
                    assert_eq!((c.label.as_str(), c.total), ("5b", 6));
                    found = true;
                }
            }
        }
        assert!(found);
    }

    #[test]
    fn parity_examples() {
        let r = parity_relation(&base(11), &field(1, 5)).unwrap();
        assert_eq!(r.beta, 0);
        assert_eq!(r.clause, "1d");
        assert_eq!(selmer_parity_shift(&base(11), &field(1, 5)).unwrap().s, 0);
        for (p, q) in twin_pairs_below(300) {
            // D = 5 mod 8, symbols equal
            for d in [5i128, 13, 21, 29, 37] {
                if gcd(d, (p * q) as i128) == 1 && legendre(d, p) == legendre(d, q) {
                    let r = parity_relation(&base(p), &field(1, d)).unwrap();
                    assert_eq!((r.clause.as_str(), r.beta), ("2d", 1));
                }
            }
            // D = 1 mod 8, symbols equal
            if gcd(17, (p * q) as i128) == 1 && legendre(17, p) == legendre(17, q) {
                let r = parity_relation(&base(p), &field(1, 17)).unwrap();
                assert_eq!((r.clause.as_str(), r.beta), ("1a", 0));
            }
        }
    }

    #[test]
    fn delta_two_formula_matches_closed_table() {
        for (p, q) in twin_pairs_below(200) {
            for d in (1i128..150).filter(|&d| squarefree_odd(d) && gcd(d, (p * q) as i128) == 1) {
                for mu in [1, -1] {
                    let Ok(f) = TwistField::new(mu, d) else { continue };
                    if f.residue8() != 1 {
                        assert_eq!(
                            Some(delta_two_formula(&base(p), &f).unwrap()),
                            delta_two_closed(f.residue8(), p)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn partition_and_consistency_sweep() {
        let mut n = 0;
        for (p, q) in twin_pairs_below(200) {
            for eps in [1, -1] {
                let e = CurveSpec::validate(eps, p, q, 1).unwrap();
                for d in (1i128..=150).filter(|&d| squarefree_odd(d) && gcd(d, (p * q) as i128) == 1) {
                    for mu in [1, -1] {
                        let Ok(f) = TwistField::new(mu, d) else { continue };
                        assert_eq!(delta_case_match_count(&e, &f), 1);
                        let comp = delta_components(&e, &f).unwrap();
                        let case = delta_case(&e, &f).unwrap();
                        assert_eq!(comp.total, case.total, "p={p} mu={mu} D={d}");
                        let lo = 2 * f.n() + f.mu0 as u32;
                        assert!(lo <= comp.total && comp.total <= lo + 4);
                        assert_eq!(
                            parity_relation(&e, &f).unwrap().beta,
                            selmer_parity_shift(&e, &f).unwrap().s
                        );
                        n += 1;
                    }
                }
            }
        }
        assert!(n > 2_000, "only {n} cases");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(delta_components(&base(3), &field(1, 15)), Err(Error::Twist(_))));
        let twisted = CurveSpec::validate(1, 3, 5, 7).unwrap();
        assert!(delta_components(&twisted, &field(1, 7)).is_err());
    }
}
