//! Exhaustive table-versus-oracle sweeps with deterministic CSV output.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twincurve::arith::{twin_pairs_below, FactoredInteger};
use twincurve::curves::CurveSpec;
use twincurve::localdata::{anomalous_scan, count_reduced_solutions, predicted_count};
use twincurve::lseries::{root_number, root_number_constructive};
use twincurve::normindex::{delta_case, delta_case_match_count, delta_components, TwistField};
use twincurve::Budgets;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Counts,
    Delta,
    Rootnumbers,
    Anomalous,
    Partition,
}

impl Check {
    pub const ALL: [Check; 5] = [Check::Counts, Check::Delta, Check::Rootnumbers, Check::Anomalous, Check::Partition];

    pub fn name(self) -> &'static str {
        match self {
            Check::Counts => "counts",
            Check::Delta => "delta",
            Check::Rootnumbers => "rootnumbers",
            Check::Anomalous => "anomalous",
            Check::Partition => "partition",
        }
    }

    pub fn parse(s: &str) -> Result<Check, CliError> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown check {s:?}; expected one of counts, delta, rootnumbers, anomalous, partition")))
    }
}

/// One CSV row: `epsilon,p,q,D,mu,check,expected,actual,pass`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Row {
    pub epsilon: i8,
    pub p: u64,
    pub q: u64,
    #[serde(rename = "D")]
    pub d: i128,
    pub mu: Option<i8>,
    pub check: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

impl Row {
    fn sort_key(&self) -> (u64, i128, Option<i8>, i8, &str) {
        (self.p, self.d, self.mu, self.epsilon, &self.check)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepParams {
    pub p_max: u64,
    pub d_max: u64,
    /// Largest prime scanned by the anomalous check.
    pub l_max: u64,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepResult {
    pub params: SweepParams,
    pub rows_total: usize,
    pub passed: usize,
    pub failed: usize,
    pub failures: Vec<Row>,
}

/// Odd square-free `D` in `1..=d_max` coprime to `pq`.
pub fn twist_values(p: u64, q: u64, d_max: u64) -> Vec<i128> {
    (1..=d_max as i128)
        .step_by(2)
        .filter(|&d| d % p as i128 != 0 && d % q as i128 != 0)
        .filter(|&d| FactoredInteger::from_i128(d).map(|f| f.is_squarefree()).unwrap_or(false))
        .collect()
}

fn row(spec_eps: i8, p: u64, q: u64, d: i128, mu: Option<i8>, check: String, expected: String, actual: String) -> Row {
    let pass = expected == actual;
    Row { epsilon: spec_eps, p, q, d, mu, check, expected, actual, pass }
}

fn err_text(e: twincurve::Error) -> String {
    format!("error: {e}")
}

pub fn count_rows(p: u64, q: u64, ds: &[i128], extra_l: &[u64]) -> Vec<Row> {
    let mut out = Vec::new();
    for &d in ds {
        for eps in [1i8, -1] {
            let Ok(spec) = CurveSpec::validate(eps as i64, p, q, d) else { continue };
            let mut ls: Vec<u64> = [2u64, 3, 5, 7].into_iter().chain(extra_l.iter().copied()).chain(spec.d.primes()).collect();
            ls.sort_unstable();
            ls.dedup();
            for l in ls {
                let expected = predicted_count(&spec, l).map(|c| c.count.to_string()).unwrap_or_else(err_text);
                let actual = count_reduced_solutions(&spec, l).to_string();
                out.push(row(eps, p, q, d, None, format!("count@{l}"), expected, actual));
            }
        }
    }
    out
}

pub fn delta_rows(p: u64, q: u64, ds: &[i128], consistency: bool, partition: bool) -> Vec<Row> {
    let mut out = Vec::new();
    let Ok(spec) = CurveSpec::validate(1, p, q, 1) else { return out };
    for &d in ds {
        for mu in [1i8, -1] {
            if mu == 1 && d == 1 {
                continue;
            }
            let Ok(field) = TwistField::new(mu as i64, d) else { continue };
            if partition {
                let n = delta_case_match_count(&spec, &field);
                out.push(row(1, p, q, d, Some(mu), "partition".into(), "1".into(), n.to_string()));
            }
            if consistency {
                let expected = delta_case(&spec, &field).map(|c| c.total.to_string()).unwrap_or_else(err_text);
                let actual = delta_components(&spec, &field).map(|b| b.total.to_string()).unwrap_or_else(err_text);
                out.push(row(1, p, q, d, Some(mu), "delta".into(), expected, actual));
            }
        }
    }
    out
}

pub fn root_number_rows(p: u64, q: u64) -> Vec<Row> {
    let mut out = Vec::new();
    for eps in [1i8, -1] {
        let Ok(spec) = CurveSpec::validate(eps as i64, p, q, 1) else { continue };
        let expected = root_number(&spec).map(|w| w.to_string()).unwrap_or_else(err_text);
        let actual = root_number_constructive(&spec).map(|w| w.global.to_string()).unwrap_or_else(err_text);
        out.push(row(eps, p, q, 1, None, "rootnumber".into(), expected, actual));
    }
    out
}

pub fn anomalous_rows(p: u64, q: u64, ds: &[i128], l_max: u64, budget: u64) -> Vec<Row> {
    let mut out = Vec::new();
    for &d in ds {
        for eps in [1i8, -1] {
            let Ok(spec) = CurveSpec::validate(eps as i64, p, q, d) else { continue };
            let actual = anomalous_scan(&spec, l_max, budget)
                .map(|v| v.iter().map(u64::to_string).collect::<Vec<_>>().join(";"))
                .unwrap_or_else(err_text);
            out.push(row(eps, p, q, d, None, format!("anomalous<={l_max}"), String::new(), actual));
        }
    }
    out
}

pub fn run(params: &SweepParams, budgets: &Budgets) -> Result<(Vec<Row>, SweepResult), CliError> {
    if params.p_max > budgets.prime_enumeration {
        return Err(twincurve::Error::Range(format!(
            "p_max = {} exceeds the prime enumeration budget {}",
            params.p_max, budgets.prime_enumeration
        ))
        .into());
    }
    if params.checks.contains(&Check::Anomalous) && params.l_max > budgets.prime_enumeration {
        return Err(twincurve::Error::Range(format!(
            "l_max = {} exceeds the prime enumeration budget {}",
            params.l_max, budgets.prime_enumeration
        ))
        .into());
    }
    if params.checks.contains(&Check::Counts) && params.d_max > budgets.prime_enumeration {
        return Err(twincurve::Error::Range(format!("d_max = {} exceeds the prime enumeration budget", params.d_max)).into());
    }
    let pairs = twin_pairs_below(params.p_max);
    let has = |c: Check| params.checks.contains(&c);
    let mut rows: Vec<Row> = pairs
        .par_iter()
        .flat_map_iter(|&(p, q)| {
            let ds = twist_values(p, q, params.d_max.max(1));
            let mut out = Vec::new();
            if has(Check::Counts) {
                out.extend(count_rows(p, q, &ds, &[p, q]));
            }
            if has(Check::Delta) || has(Check::Partition) {
                out.extend(delta_rows(p, q, &ds, has(Check::Delta), has(Check::Partition)));
            }
            if has(Check::Rootnumbers) {
                out.extend(root_number_rows(p, q));
            }
            if has(Check::Anomalous) {
                out.extend(anomalous_rows(p, q, &ds, params.l_max, budgets.prime_enumeration));
            }
            out
        })
        .collect();
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()).then_with(|| a.cmp(b)));
    let failures: Vec<Row> = rows.iter().filter(|r| !r.pass).cloned().collect();
    let result = SweepResult {
        params: params.clone(),
        rows_total: rows.len(),
        passed: rows.len() - failures.len(),
        failed: failures.len(),
        failures,
    };
    Ok((rows, result))
}

pub fn to_csv(rows: &[Row]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["epsilon", "p", "q", "D", "mu", "check", "expected", "actual", "pass"])
        .map_err(|e| CliError::Usage(e.to_string()))?;
    for r in rows {
        let mu = r.mu.map(|m| m.to_string()).unwrap_or_default();
        w.write_record([
            r.epsilon.to_string(),
            r.p.to_string(),
            r.q.to_string(),
            r.d.to_string(),
            mu,
            r.check.clone(),
            r.expected.clone(),
            r.actual.clone(),
            r.pass.to_string(),
        ])
        .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p_max: u64, d_max: u64, checks: Vec<Check>) -> SweepParams {
        SweepParams { p_max, d_max, l_max: 500, checks }
    }

    #[test]
    fn small_sweeps_pass() {
        let b = Budgets::default();
        let (_, r) = run(&params(60, 40, Check::ALL.to_vec()), &b).unwrap();
        assert!(r.rows_total > 0);
        assert_eq!(r.failed, 0, "{:?}", r.failures);
    }

    #[test]
    fn csv_is_deterministic_and_sorted() {
        let b = Budgets::default();
        let p = params(80, 30, vec![Check::Delta, Check::Counts]);
        let (rows1, _) = run(&p, &b).unwrap();
        let (rows2, _) = run(&p, &b).unwrap();
        let (c1, c2) = (to_csv(&rows1).unwrap(), to_csv(&rows2).unwrap());
        assert_eq!(c1, c2);
        let text = String::from_utf8(c1).unwrap();
        assert!(text.starts_with("epsilon,p,q,D,mu,check,expected,actual,pass\n"));
        assert!(rows1.windows(2).all(|w| (w[0].p, w[0].d, w[0].mu) <= (w[1].p, w[1].d, w[1].mu)));
    }

    #[test]
    fn budget_excess_is_reported() {
        let b = Budgets { prime_enumeration: 100, ..Budgets::default() };
        let e = run(&params(200, 1, vec![Check::Rootnumbers]), &b).unwrap_err();
        assert_eq!(e.exit_code(), crate::EXIT_BUDGET);
    }

    #[test]
    fn parse_checks() {
        assert_eq!(Check::parse("delta").unwrap(), Check::Delta);
        assert!(Check::parse("bogus").is_err());
    }
}
