//! Per-curve report.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use twincurve::curves::{CurveSpec, TorsionGroup};
use twincurve::galois::{rho_surjective, torsion_ramified_at, RamificationVerdict, SurjectivityVerdict};
use twincurve::localdata::{
    count_reduced_solutions, predicted_count, reduction_data, tate, LocalReductionData,
};
use twincurve::lseries::{
    l_value_at_1, parity_check, root_number, root_number_constructive, twisted_root_number, LSeriesApprox,
    ParityVerdict, RootNumberData,
};
use twincurve::normindex::{delta_case, delta_components, parity_relation, DeltaCase, NormIndexBreakdown, ParityRelation, TwistField};
use twincurve::Budgets;

use crate::provenance::{tag, Tagged, BRUTE_FORCE, COMPONENTS, DEFINITION, IMPORTED, LOCAL_PRODUCT, SERIES, TABLE, TATE};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecEcho {
    pub epsilon: i8,
    pub p: u64,
    pub q: u64,
    #[serde(rename = "D")]
    pub d: i128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JInvariant {
    pub numerator: i128,
    pub denominator: i128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalEntry {
    pub data: Tagged<LocalReductionData>,
    /// Whether the Tate algorithm on the model gives the same type,
    /// Tamagawa number and conductor exponent.
    pub tate_agrees: Tagged<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountEntry {
    pub l: u64,
    pub predicted: Tagged<u64>,
    pub rule: String,
    pub enumerated: Tagged<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootNumberReport {
    pub table: Tagged<i8>,
    pub constructive: Tagged<RootNumberData>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaloisReport {
    pub ramification: Vec<RamificationVerdict>,
    pub surjectivity: Vec<SurjectivityVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormIndexEntry {
    pub mu: i8,
    #[serde(rename = "D")]
    pub d: i128,
    pub breakdown: Tagged<NormIndexBreakdown>,
    pub case: Tagged<DeltaCase>,
    pub parity: Tagged<ParityRelation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub spec: SpecEcho,
    pub coefficients: Tagged<[i128; 5]>,
    pub discriminant: Tagged<i128>,
    pub j_invariant: Tagged<JInvariant>,
    pub conductor: Tagged<i128>,
    pub local_data: Vec<LocalEntry>,
    pub point_counts: Vec<CountEntry>,
    pub torsion: Tagged<TorsionGroup>,
    /// Present for `D = 1`.
    pub root_number: Option<RootNumberReport>,
    /// Present for `D != 1` when `D = 1 mod 4`, the case with a sign formula.
    pub twisted_root_number: Option<Tagged<i8>>,
    pub parity: Option<Tagged<ParityVerdict>>,
    pub l_value: Option<Tagged<LSeriesApprox>>,
    pub galois: GaloisReport,
    pub norm_index: Vec<NormIndexEntry>,
}

pub struct ReportRequest {
    pub epsilon: i64,
    pub p: u64,
    pub q: u64,
    pub d: i128,
    /// Norm-index breakdowns over `Q(sqrt(mu |D|))` for each listed `mu`.
    pub mus: Vec<i64>,
    pub with_l_value: bool,
}

fn same_local(a: &LocalReductionData, b: &LocalReductionData) -> bool {
    a.kodaira == b.kodaira && a.tamagawa == b.tamagawa && a.conductor_exponent == b.conductor_exponent
}

pub fn build(req: &ReportRequest, budgets: &Budgets) -> Result<CurveReport, CliError> {
    let spec = CurveSpec::validate(req.epsilon, req.p, req.q, req.d)?;
    let inv = spec.invariants()?;
    let c = spec.coeffs();

    let mut local_data = Vec::new();
    for l in spec.bad_primes() {
        let table = reduction_data(&spec, l)?;
        let t = tate(&c, l)?;
        local_data.push(LocalEntry {
            tate_agrees: tag(same_local(&table, &t.data), TATE),
            data: tag(table, TABLE),
        });
    }

    let mut ls: Vec<u64> = vec![2, 3, 5, 7, spec.p, spec.q];
    ls.extend(spec.d.primes());
    ls.sort_unstable();
    ls.dedup();
    let mut point_counts = Vec::new();
    for l in ls {
        let pc = predicted_count(&spec, l)?;
        point_counts.push(CountEntry {
            l,
            predicted: tag(pc.count, TABLE),
            rule: pc.rule,
            enumerated: tag(count_reduced_solutions(&spec, l), BRUTE_FORCE),
        });
    }

    let (root, twisted, parity, l_value) = if spec.is_base() {
        let table = root_number(&spec)?;
        let constructive = root_number_constructive(&spec)?;
        let lv = if req.with_l_value { Some(tag(l_value_at_1(&spec, None, budgets)?, SERIES)) } else { None };
        (
            Some(RootNumberReport { table: tag(table, TABLE), constructive: tag(constructive, LOCAL_PRODUCT) }),
            None,
            Some(tag(parity_check(&spec)?, IMPORTED)),
            lv,
        )
    } else {
        let dv = spec.d_value();
        let tw = if dv.rem_euclid(4) == 1 {
            let field = TwistField::new(dv.signum() as i64, dv.abs())?;
            Some(tag(twisted_root_number(&spec.base(), &field)?, LOCAL_PRODUCT))
        } else {
            None
        };
        (None, tw, None, None)
    };

    let mut ramification = Vec::new();
    for l in [3u64, 5, 7] {
        for at in [spec.p, spec.q] {
            ramification.push(torsion_ramified_at(&spec, l, at)?);
        }
    }
    let surjectivity = vec![rho_surjective(&spec, 3)?, rho_surjective(&spec, 7)?];

    let mut norm_index = Vec::new();
    for &mu in &req.mus {
        let d = req.d.abs();
        let field = TwistField::new(mu, d)?;
        let base = spec.base();
        norm_index.push(NormIndexEntry {
            mu: mu as i8,
            d,
            breakdown: tag(delta_components(&base, &field)?, COMPONENTS),
            case: tag(delta_case(&base, &field)?, TABLE),
            parity: tag(parity_relation(&base, &field)?, TABLE),
        });
    }

    Ok(CurveReport {
        spec: SpecEcho { epsilon: spec.epsilon, p: spec.p, q: spec.q, d: spec.d_value() },
        coefficients: tag([c.a1, c.a2, c.a3, c.a4, c.a6], DEFINITION),
        discriminant: tag(inv.discriminant, DEFINITION),
        j_invariant: tag(JInvariant { numerator: inv.j_numerator, denominator: inv.j_denominator }, DEFINITION),
        conductor: tag(inv.conductor, TABLE),
        local_data,
        point_counts,
        torsion: tag(spec.torsion_group()?, BRUTE_FORCE),
        root_number: root,
        twisted_root_number: twisted,
        parity,
        l_value,
        galois: GaloisReport { ramification, surjectivity },
        norm_index,
    })
}

pub fn torsion_name(structure: &[u64]) -> String {
    if structure.is_empty() {
        return "trivial".into();
    }
    structure.iter().map(|n| format!("Z/{n}")).collect::<Vec<_>>().join(" x ")
}

pub fn render_text(r: &CurveReport) -> String {
    let mut s = String::new();
    let e = &r.spec;
    let root = |m: u64| {
        let k = e.epsilon as i128 * m as i128 * e.d;
        if k < 0 { format!("x - {}", -k) } else { format!("x + {k}") }
    };
    let _ = writeln!(s, "E^{}_{}: y^2 = x({})({})", e.epsilon, e.d, root(e.p), root(e.q));
    let [a1, a2, a3, a4, a6] = r.coefficients.value;
    let _ = writeln!(s, "coefficients  [{a1}, {a2}, {a3}, {a4}, {a6}]");
    let _ = writeln!(s, "discriminant  {}", r.discriminant.value);
    let _ = writeln!(s, "j-invariant   {}/{}", r.j_invariant.value.numerator, r.j_invariant.value.denominator);
    let _ = writeln!(s, "conductor     {}", r.conductor.value);
    let _ = writeln!(s, "torsion       {}", torsion_name(&r.torsion.value.structure));
    let _ = writeln!(s, "bad primes:");
    for le in &r.local_data {
        let d = &le.data.value;
        let _ = writeln!(
            s,
            "  l = {:<6} {:<24} {:<5} c = {}  f = {}  ord(disc) = {}  tate {}",
            d.l,
            format!("{:?}", d.class),
            d.kodaira.to_string(),
            d.tamagawa,
            d.conductor_exponent,
            d.disc_valuation,
            if le.tate_agrees.value { "agrees" } else { "DISAGREES" }
        );
    }
    let _ = writeln!(s, "point counts (solutions + infinity):");
    for c in &r.point_counts {
        let mark = if c.predicted.value == c.enumerated.value { "ok" } else { "MISMATCH" };
        let _ = writeln!(s, "  l = {:<6} table {:<7} enumerated {:<7} {mark}", c.l, c.predicted.value, c.enumerated.value);
    }
    if let Some(rn) = &r.root_number {
        let k = &rn.constructive.value;
        let _ = writeln!(
            s,
            "root number   {} (local product: inf {} , 2 {} , p {} , q {} -> {})",
            rn.table.value, k.omega_inf, k.omega_2, k.omega_p, k.omega_q, k.global
        );
    }
    if let Some(t) = &r.twisted_root_number {
        let _ = writeln!(s, "root number   {} (twist formula)", t.value);
    }
    if let Some(p) = &r.parity {
        let v = &p.value;
        let opt = |x: Option<String>| x.unwrap_or_else(|| "none".into());
        let _ = writeln!(
            s,
            "parity        {:?} (family {}, rank {})",
            v.status,
            opt(v.family.map(|f| f.to_string())),
            opt(v.rank.map(|r| r.to_string()))
        );
    }
    if let Some(l) = &r.l_value {
        let v = &l.value;
        let _ = writeln!(s, "L(E, 1)       {:.15} (N = {}, tail <= {:.1e})", v.value, v.truncation, v.tail_bound);
    }
    for g in &r.galois.surjectivity {
        let _ = writeln!(s, "rho mod {}     {:?}", g.l, g.status);
    }
    for n in &r.norm_index {
        let b = &n.breakdown.value;
        let _ = writeln!(
            s,
            "delta over Q(sqrt({})) = {} + {} + {} + {} = {} (row {}, row total {}), parity beta = {}",
            n.mu as i128 * n.d,
            b.delta_inf,
            b.delta_g,
            b.delta_m,
            b.delta_a,
            b.total,
            n.case.value.label,
            n.case.value.total,
            n.parity.value.beta
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(e: i64, p: u64, d: i128, mus: Vec<i64>) -> ReportRequest {
        ReportRequest { epsilon: e, p, q: p + 2, d, mus, with_l_value: true }
    }

    #[test]
    fn worked_example() {
        for e in [1, -1] {
            let r = build(&req(e, 3, 1, vec![]), &Budgets::default()).unwrap();
            assert_eq!(r.conductor.value, 480);
            assert_eq!(r.root_number.as_ref().unwrap().table.value as i64, -e);
            assert_eq!(torsion_name(&r.torsion.value.structure), "Z/2 x Z/2");
            assert!(r.local_data.iter().all(|l| l.tate_agrees.value));
        }
    }

    #[test]
    fn norm_index_example() {
        let r = build(&req(1, 11, 5, vec![1]), &Budgets::default()).unwrap();
        assert_eq!(r.norm_index[0].breakdown.value.total, 4);
        assert_eq!(r.norm_index[0].case.value.total, 4);
    }

    #[test]
    fn invalid_twist_is_a_validation_error() {
        let e = build(&req(1, 3, 9, vec![]), &Budgets::default()).unwrap_err();
        assert_eq!(e.exit_code(), crate::EXIT_VALIDATION);
    }

    #[test]
    fn json_round_trip() {
        for (e, p, d, mus) in [(1, 3, 1, vec![]), (-1, 11, 5, vec![1, -1]), (1, 17, -7, vec![1])] {
            let r = build(&req(e, p, d, mus), &Budgets::default()).unwrap();
            let text = serde_json::to_string_pretty(&r).unwrap();
            let back: CurveReport = serde_json::from_str(&text).unwrap();
            assert_eq!(back, r);
            assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
        }
    }
}
