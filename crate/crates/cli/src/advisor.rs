//! Conditional rank conclusions: machine-checkable hypotheses are verified,
//! the rest must be asserted by the user and are reported as such.

use serde::{Deserialize, Serialize};
use twincurve::curves::CurveSpec;
use twincurve::galois::torsion_ramified_at;
use twincurve::localdata::{reduction_data, ReductionClass};
use twincurve::normindex::{parity_relation, TwistField};

use crate::report::SpecEcho;
use crate::CliError;

/// Facts the user may assert; none of them is computable here.
pub const VOCABULARY: [&str; 9] = [
    "selp-trivial",
    "selq-trivial",
    "sel5-trivial",
    "sel7-trivial",
    "e5-irreducible",
    "e7-irreducible",
    "sel5-order-5",
    "sel7-order-7",
    "sha2-square",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub text: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// Every checkable hypothesis holds and every other one was asserted.
    Applies,
    /// A checkable hypothesis fails.
    Excluded,
    /// Checkable hypotheses hold but some facts were not asserted.
    NeedsAssertions,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conclusion {
    pub criterion: String,
    pub statement: String,
    pub status: Status,
    pub verified: Vec<Hypothesis>,
    /// Known results the criterion relies on, not rechecked here.
    pub imported: Vec<String>,
    pub asserted: Vec<String>,
    pub missing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Advice {
    pub spec: SpecEcho,
    pub mu: Option<i8>,
    pub asserted: Vec<String>,
    /// Criteria whose conclusion follows from verified plus asserted facts.
    pub conclusions: Vec<Conclusion>,
    /// All criteria, applicable or not.
    pub evaluated: Vec<Conclusion>,
}

pub fn parse_facts(tokens: &[String]) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    for t in tokens {
        for tok in t.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if !VOCABULARY.contains(&tok) {
                return Err(CliError::Usage(format!("unknown fact {tok:?}; supported: {}", VOCABULARY.join(", "))));
            }
            if !out.iter().any(|x| x == tok) {
                out.push(tok.to_string());
            }
        }
    }
    Ok(out)
}

fn h(text: impl Into<String>, holds: bool) -> Hypothesis {
    Hypothesis { text: text.into(), holds }
}

fn conclude(criterion: &str, statement: &str, verified: Vec<Hypothesis>, imported: Vec<String>, needs: &[&str], facts: &[String]) -> Conclusion {
    let asserted: Vec<String> = needs.iter().filter(|n| facts.iter().any(|f| f == *n)).map(|s| s.to_string()).collect();
    let missing: Vec<String> = needs.iter().filter(|n| !facts.iter().any(|f| f == *n)).map(|s| s.to_string()).collect();
    let status = if verified.iter().any(|v| !v.holds) {
        Status::Excluded
    } else if missing.is_empty() {
        Status::Applies
    } else {
        Status::NeedsAssertions
    };
    Conclusion {
        criterion: criterion.into(),
        statement: statement.into(),
        status,
        verified,
        imported,
        asserted,
        missing,
    }
}

pub fn advise(epsilon: i64, p: u64, q: u64, d: i128, mu: Option<i64>, facts: &[String]) -> Result<Advice, CliError> {
    let spec = CurveSpec::validate(epsilon, p, q, d)?;
    let divides_pqd = |l: u64| spec.p == l || spec.q == l || spec.d.primes().any(|x| x == l);
    let class = |l: u64| reduction_data(&spec, l).map(|r| r.class);
    let multiplicative_pq = class(spec.p)?.is_multiplicative() && class(spec.q)?.is_multiplicative();
    let ordinary = |l: u64| -> Result<bool, CliError> {
        Ok(!divides_pqd(l) && class(l)? == ReductionClass::GoodOrdinary)
    };
    let ramified = |l: u64, at: u64| torsion_ramified_at(&spec, l, at).map(|v| v.ramified);
    let rank0 = "rank E_D(Q) = analytic rank = 0";
    let rank1 = "rank E_D(Q) = analytic rank = 1";
    let mut all = Vec::new();

    for (label, l, at, token) in [("rank-zero, criterion 1", spec.p, spec.q, "selp-trivial"), ("rank-zero, criterion 2", spec.q, spec.p, "selq-trivial")] {
        let verified = vec![
            h("p > 37", spec.p > 37),
            h("multiplicative reduction at p and q", multiplicative_pq),
            h(format!("E_D[{l}] ramified at {at}"), ramified(l, at)?),
        ];
        all.push(conclude(label, rank0, verified, vec![format!("E_D[{l}] irreducible for p > 37 (no CM)")], &[token], facts));
    }

    let p7 = matches!(spec.p % 7, 1 | 4);
    let two_exact = [spec.p, spec.q]
        .iter()
        .filter(|&&l| reduction_data(&spec, l).map(|r| r.conductor_exponent == 1).unwrap_or(false))
        .count()
        == 2;
    let conductor_not_squarefree = reduction_data(&spec, 2)?.conductor_exponent > 1;
    for (l, zero_tok, one_tok, irr) in [(5u64, "sel5-trivial", "sel5-order-5", "e5-irreducible"), (7, "sel7-trivial", "sel7-order-7", "e7-irreducible")] {
        let mut base = vec![h(format!("{l} does not divide pqD"), !divides_pqd(l))];
        if l == 7 {
            base.push(h("p = 1, 4 mod 7", p7));
        }
        base.push(h(format!("good ordinary reduction at {l}"), ordinary(l)?));
        let ram_p = ramified(l, spec.p)?;
        let ram_q = ramified(l, spec.q)?;
        let mut v0 = base.clone();
        v0.push(h(format!("E_D[{l}] ramified at p"), ram_p));
        let n = if l == 5 { 3 } else { 4 };
        all.push(conclude(&format!("rank-zero, criterion {n}"), rank0, v0, vec![], &[irr, zero_tok], facts));
        let mut v1 = base;
        v1.push(h(format!("E_D[{l}] ramified at p and at q"), ram_p && ram_q));
        v1.push(h("conductor not square-free", conductor_not_squarefree));
        v1.push(h("p and q divide the conductor exactly once", two_exact));
        let n = if l == 5 { 1 } else { 2 };
        all.push(conclude(&format!("rank-one, criterion {n}"), rank1, v1, vec![], &[irr, one_tok], facts));
    }

    if let Some(mu) = mu {
        let field = TwistField::new(mu, d.abs())?;
        let base = spec.base();
        let rel = parity_relation(&base, &field)?;
        let verified = vec![
            h(format!("parity row {} predicts odd rank up to dim Sha(E/K)[2] (beta = {})", rel.clause, rel.beta), rel.beta == 1),
        ];
        all.push(conclude(
            "positive rank over K",
            &format!("rank E(K) > 0 for K = Q(sqrt({}))", field.md()),
            verified,
            vec!["rank E(K) = delta(E, Q, K) + dim Sha(E/K)[2] mod 2".to_string()],
            &["sha2-square"],
            facts,
        ));
    }

    let conclusions = all.iter().filter(|c| c.status == Status::Applies).cloned().collect();
    Ok(Advice {
        spec: SpecEcho { epsilon: spec.epsilon, p: spec.p, q: spec.q, d: spec.d_value() },
        mu: mu.map(|m| m as i8),
        asserted: facts.to_vec(),
        conclusions,
        evaluated: all,
    })
}

pub fn render_text(a: &Advice) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "E^{}_{} with (p, q) = ({}, {}); asserted: {}\n",
        a.spec.epsilon,
        a.spec.d,
        a.spec.p,
        a.spec.q,
        if a.asserted.is_empty() { "nothing".to_string() } else { a.asserted.join(", ") }
    ));
    for c in &a.evaluated {
        let tag = match c.status {
            Status::Applies => "APPLIES",
            Status::Excluded => "excluded",
            Status::NeedsAssertions => "needs assertions",
        };
        s.push_str(&format!("[{tag}] {}: {}\n", c.criterion, c.statement));
        for v in &c.verified {
            s.push_str(&format!("    verified {} {}\n", if v.holds { "yes" } else { "NO " }, v.text));
        }
        for i in &c.imported {
            s.push_str(&format!("    imported     {i}\n"));
        }
        for x in &c.asserted {
            s.push_str(&format!("    asserted     {x}\n"));
        }
        for x in &c.missing {
            s.push_str(&format!("    missing      {x}\n"));
        }
    }
    if a.conclusions.is_empty() {
        s.push_str("no conclusion follows from the verified and asserted facts\n");
    } else {
        for c in &a.conclusions {
            s.push_str(&format!("conclusion ({}), conditional on the asserted facts: {}\n", c.criterion, c.statement));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn facts(s: &[&str]) -> Vec<String> {
        parse_facts(&s.iter().map(|x| x.to_string()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn rank_zero_via_five() {
        // 5 does not divide 11 * 13
        let a = advise(1, 11, 13, 1, None, &facts(&["e5-irreducible", "sel5-trivial"])).unwrap();
        let c: Vec<_> = a.conclusions.iter().map(|c| c.criterion.as_str()).collect();
        assert_eq!(c, vec!["rank-zero, criterion 3"]);
        let c = &a.conclusions[0];
        assert!(c.verified.iter().all(|v| v.holds));
        assert_eq!(c.asserted, vec!["e5-irreducible", "sel5-trivial"]);
    }

    #[test]
    fn rank_one_via_seven() {
        // p = 29 = 1 mod 7, 7 does not divide 29 * 31
        let a = advise(1, 29, 31, 1, None, &facts(&["e7-irreducible", "sel7-order-7"])).unwrap();
        assert!(a.conclusions.iter().any(|c| c.criterion == "rank-one, criterion 2"));
        // p = 17 = 3 mod 7 is supersingular at 7
        let a = advise(1, 17, 19, 1, None, &facts(&["e7-irreducible", "sel7-order-7"])).unwrap();
        assert!(a.conclusions.is_empty());
    }

    #[test]
    fn positive_rank_over_k() {
        // find a (D, mu) with beta = 1 and check it is reported
        let base = CurveSpec::validate(1, 11, 13, 1).unwrap();
        let (d, mu) = [(5i128, 1i64), (5, -1), (7, 1), (7, -1), (3, 1), (3, -1)]
            .into_iter()
            .find(|&(d, mu)| parity_relation(&base, &TwistField::new(mu, d).unwrap()).unwrap().beta == 1)
            .unwrap();
        let a = advise(1, 11, 13, d, Some(mu), &facts(&["sha2-square"])).unwrap();
        assert!(a.conclusions.iter().any(|c| c.criterion == "positive rank over K"));
        let a = advise(1, 11, 13, d, Some(mu), &[]).unwrap();
        assert!(a.conclusions.is_empty());
    }

    #[test]
    fn nothing_is_unconditional() {
        let a = advise(-1, 41, 43, 1, None, &[]).unwrap();
        assert!(a.conclusions.is_empty());
        assert!(a.evaluated.iter().all(|c| c.status != Status::Applies));
    }

    #[test]
    fn unknown_fact_is_a_usage_error() {
        let e = parse_facts(&["sel5-trivial,bogus".to_string()]).unwrap_err();
        assert_eq!(e.exit_code(), crate::EXIT_VALIDATION);
    }
}
