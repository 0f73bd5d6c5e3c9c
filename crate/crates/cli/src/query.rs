//! The `lvalue` and `classgroup` subcommands.

use serde::{Deserialize, Serialize};
use twincurve::arith::FactoredInteger;
use twincurve::classgroup::{class_group, rank_bound, s_class_group, ClassGroupData, RankBound, SClassData};
use twincurve::curves::CurveSpec;
use twincurve::lseries::{l_derivative_at_1, l_value_at_1, root_number, twisted_l_value, twisted_root_number, LSeriesApprox};
use twincurve::normindex::TwistField;
use twincurve::Budgets;

use crate::report::SpecEcho;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LValueOutput {
    pub spec: SpecEcho,
    /// `"value"`, `"derivative"` or `"twisted"`.
    pub kind: String,
    pub order: Option<u32>,
    /// Set for twisted values: the field is `Q(sqrt(mu |D|))`.
    pub mu: Option<i8>,
    pub root_number: i8,
    pub result: LSeriesApprox,
}

pub struct LValueRequest {
    pub epsilon: i64,
    pub p: u64,
    pub q: u64,
    pub d: i128,
    pub derivative: Option<u32>,
    pub mu: Option<i64>,
    pub terms: Option<u64>,
}

pub fn lvalue(req: &LValueRequest, budgets: &Budgets) -> Result<LValueOutput, CliError> {
    let spec = CurveSpec::validate(req.epsilon, req.p, req.q, req.d)?;
    if let Some(n) = req.terms {
        if n > budgets.series_truncation {
            return Err(twincurve::Error::Range(format!("{n} terms exceed the series budget {}", budgets.series_truncation)).into());
        }
    }
    let echo = SpecEcho { epsilon: spec.epsilon, p: spec.p, q: spec.q, d: spec.d_value() };
    match (req.mu, req.derivative) {
        (Some(_), Some(_)) => Err(CliError::Usage("--mu and --derivative cannot be combined".into())),
        (Some(mu), None) => {
            let field = TwistField::new(mu, req.d.abs())?;
            let base = spec.base();
            Ok(LValueOutput {
                spec: echo,
                kind: "twisted".into(),
                order: None,
                mu: Some(mu as i8),
                root_number: twisted_root_number(&base, &field)?,
                result: twisted_l_value(&base, &field, req.terms, budgets)?,
            })
        }
        (None, r) => {
            let result = match r {
                Some(r) => l_derivative_at_1(&spec, r, req.terms, budgets)?,
                None => l_value_at_1(&spec, req.terms, budgets)?,
            };
            Ok(LValueOutput {
                spec: echo,
                kind: if r.is_some() { "derivative" } else { "value" }.into(),
                order: r,
                mu: None,
                root_number: root_number(&spec)?,
                result,
            })
        }
    }
}

pub fn render_lvalue(o: &LValueOutput) -> String {
    let what = match (o.kind.as_str(), o.order, o.mu) {
        ("twisted", _, Some(mu)) => format!("L(E^{}, chi_{{{}*{}}}, 1)", o.spec.epsilon, mu, o.spec.d.abs()),
        ("derivative", Some(r), _) => format!("order-{r} integral at s = 1"),
        _ => "L(E, 1)".to_string(),
    };
    let mut s = format!(
        "E^{}_{} with (p, q) = ({}, {}), root number {:+}\n{what} = {:.15e}\n  terms {}, tail bound {:.3e}, formula {}\n",
        o.spec.epsilon, o.spec.d, o.spec.p, o.spec.q, o.root_number, o.result.value, o.result.truncation, o.result.tail_bound, o.result.formula_tag
    );
    if let Some(q) = o.result.quadrature_error {
        s.push_str(&format!("  quadrature step-halving error {q:.3e}\n"));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupOutput {
    pub group: ClassGroupData,
    /// With `--p`: S-class data for S = {2, p, p + 2, infinity}.
    pub s_class: Option<SClassData>,
    /// With `--p` and `--epsilon`: the Selmer rank bound for `E_D`, `D = disc`.
    pub rank_bound: Option<RankBound>,
}

pub fn classgroup(disc: i128, pq: Option<(u64, u64)>, epsilon: Option<i64>, budgets: &Budgets) -> Result<ClassGroupOutput, CliError> {
    let group = class_group(disc, budgets)?;
    let s_class = match pq {
        Some((p, q)) => Some(s_class_group(disc, p, q, budgets)?),
        None => None,
    };
    let rank_bound = match (pq, epsilon) {
        (Some((p, q)), Some(e)) => {
            let d = if disc % 4 == 0 { disc / 4 } else { disc };
            let spec = CurveSpec::validate(e, p, q, 1)?;
            Some(rank_bound(&spec, &FactoredInteger::from_i128(d)?, budgets)?)
        }
        (None, Some(_)) => return Err(CliError::Usage("--epsilon needs --p".into())),
        _ => None,
    };
    Ok(ClassGroupOutput { group, s_class, rank_bound })
}

pub fn render_classgroup(o: &ClassGroupOutput) -> String {
    let g = &o.group;
    let structure = if g.elementary_divisors.is_empty() {
        "trivial".to_string()
    } else {
        g.elementary_divisors.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" x ")
    };
    let mut s = format!("disc {}: h = {}, group {structure}, 2-rank {}\n", g.disc, g.h, g.two_rank);
    if let (Some(n), Some(u)) = (g.narrow_class_number, g.fundamental_unit_norm) {
        s.push_str(&format!("  narrow class number {n}, fundamental unit norm {u:+}\n"));
    }
    if let Some(sc) = &o.s_class {
        let ls: Vec<String> = sc.s_primes.iter().map(|x| format!("{} {:?}", x.l, x.splitting).to_lowercase()).collect();
        s.push_str(&format!(
            "  S-class number {}, S-class 2-rank {}, |S| = {} ({})\n",
            sc.s_class_number,
            sc.s_two_rank,
            sc.s_set_size,
            ls.join(", ")
        ));
    }
    if let Some(r) = &o.rank_bound {
        s.push_str(&format!("  2-Selmer rank bound {} (sharp {})\n", r.headline, r.sharp));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(e: i64, p: u64, d: i128) -> LValueRequest {
        LValueRequest { epsilon: e, p, q: p + 2, d, derivative: None, mu: None, terms: None }
    }

    #[test]
    fn value_and_vanishing() {
        let b = Budgets::default();
        let v = lvalue(&req(1, 5, 1), &b).unwrap();
        assert_eq!(v.root_number, 1);
        assert!(v.result.value > 0.0);
        let v = lvalue(&req(-1, 17, 1), &b).unwrap();
        assert_eq!(v.root_number, -1);
        assert_eq!(v.result.value, 0.0);
    }

    #[test]
    fn terms_over_budget() {
        let b = Budgets { series_truncation: 10, ..Budgets::default() };
        let e = lvalue(&LValueRequest { terms: Some(100), ..req(1, 5, 1) }, &b).unwrap_err();
        assert_eq!(e.exit_code(), crate::EXIT_BUDGET);
    }

    #[test]
    fn class_group_output() {
        let b = Budgets::default();
        let o = classgroup(-23, None, None, &b).unwrap();
        assert_eq!(o.group.h, 3);
        assert!(render_classgroup(&o).contains("Z/3"));
        let o = classgroup(-20, Some((3, 5)), None, &b).unwrap();
        assert!(o.s_class.is_some());
        assert_eq!(classgroup(-16, None, None, &b).unwrap_err().exit_code(), crate::EXIT_VALIDATION);
    }
}
