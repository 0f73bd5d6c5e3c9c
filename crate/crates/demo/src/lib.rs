//! Three JSON-returning entry points for the static page in `www/`.
//! Every function returns either the payload or `{"error": "..."}`.

use serde::Serialize;
use twincurve::arith::primes_up_to;
use twincurve::curves::CurveSpec;
use twincurve::localdata::count_points;
use twincurve::lseries::{an_coefficients, l_value_at_1, root_number};
use twincurve::normindex::{delta_components, parity_relation, TwistField};
use twincurve::Budgets;
use wasm_bindgen::prelude::*;

/// Caps keeping a browser tab responsive.
const MAX_PRIME: u64 = 5_000;
const MAX_D: u64 = 400;
const MAX_TERMS: u64 = 5_000;

#[derive(Serialize)]
struct ErrorBody {
    error: String,
}

fn to_json<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v),
        Err(error) => serde_json::to_string(&ErrorBody { error }),
    }
    .unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"))
}

fn spec(epsilon: i32, p: u32, d: i32) -> Result<CurveSpec, String> {
    CurveSpec::validate(epsilon as i64, p as u64, p as u64 + 2, d as i128).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Trace {
    l: u64,
    count: u64,
    a: i64,
}

/// `a_l` and `#E(F_l)` at good primes up to `l_max`.
#[wasm_bindgen]
pub fn frobenius_traces(epsilon: i32, p: u32, d: i32, l_max: u32) -> String {
    to_json((|| {
        let s = spec(epsilon, p, d)?;
        if l_max as u64 > MAX_PRIME {
            return Err(format!("l_max is capped at {MAX_PRIME}"));
        }
        primes_up_to(l_max as u64)
            .into_iter()
            .filter(|&l| !s.is_bad_prime(l))
            .map(|l| count_points(&s, l, MAX_PRIME).map(|c| Trace { l, count: c.count, a: c.trace }).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()
    })())
}

#[derive(Serialize)]
struct GridCell {
    #[serde(rename = "D")]
    d: i128,
    mu: i8,
    delta: u32,
    beta: u8,
}

/// Norm index and parity for square-free odd `D <= d_max` coprime to `pq`, both signs.
#[wasm_bindgen]
pub fn norm_index_grid(p: u32, d_max: u32) -> String {
    to_json((|| {
        let s = spec(1, p, 1)?;
        if d_max as u64 > MAX_D {
            return Err(format!("d_max is capped at {MAX_D}"));
        }
        let mut out = Vec::new();
        for d in (1..=d_max as i128).step_by(2) {
            for mu in [1i8, -1] {
                if d == 1 && mu == 1 {
                    continue;
                }
                let Ok(field) = TwistField::new(mu as i64, d) else { continue };
                let (Ok(b), Ok(r)) = (delta_components(&s, &field), parity_relation(&s, &field)) else { continue };
                out.push(GridCell { d, mu, delta: b.total, beta: r.beta });
            }
        }
        Ok(out)
    })())
}

#[derive(Serialize)]
struct PartialSums {
    root_number: i8,
    value: f64,
    tail_bound: f64,
    /// Damped partial sums at every term, for plotting convergence.
    partial: Vec<f64>,
}

/// Convergence of the smoothed series for `L(E, 1)`, `D = 1`.
#[wasm_bindgen]
pub fn l_series_partial_sums(epsilon: i32, p: u32, terms: u32) -> String {
    to_json((|| {
        let s = spec(epsilon, p, 1)?;
        let terms = (terms as u64).clamp(1, MAX_TERMS);
        let budgets = Budgets { series_truncation: MAX_TERMS, ..Budgets::default() };
        let w = root_number(&s).map_err(|e| e.to_string())?;
        let v = l_value_at_1(&s, Some(terms), &budgets).map_err(|e| e.to_string())?;
        let a = an_coefficients(&s, terms, &budgets).map_err(|e| e.to_string())?;
        let n = s.invariants().map_err(|e| e.to_string())?.conductor as f64;
        let c = 2.0 * std::f64::consts::PI / n.sqrt();
        let mut acc = 0.0;
        let partial = (1..=terms as usize)
            .map(|k| {
                if w == 1 {
                    acc += 2.0 * a[k] as f64 / k as f64 * (-c * k as f64).exp();
                }
                acc
            })
            .collect();
        Ok(PartialSums { root_number: w, value: v.value, tail_bound: v.tail_bound, partial })
    })())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn traces_are_bounded() {
        let v: Value = serde_json::from_str(&frobenius_traces(1, 11, 1, 200)).unwrap();
        let rows = v.as_array().unwrap();
        assert!(!rows.is_empty());
        for r in rows {
            let (l, a) = (r["l"].as_f64().unwrap(), r["a"].as_f64().unwrap());
            assert!(a.abs() <= 2.0 * l.sqrt());
            assert_eq!(r["count"].as_i64().unwrap() % 4, 0);
        }
    }

    #[test]
    fn errors_are_json() {
        let v: Value = serde_json::from_str(&frobenius_traces(1, 7, 1, 100)).unwrap();
        assert!(v["error"].is_string());
        let v: Value = serde_json::from_str(&norm_index_grid(11, 10_000)).unwrap();
        assert!(v["error"].is_string());
    }

    #[test]
    fn grid_parity_is_delta_mod_two() {
        let v: Value = serde_json::from_str(&norm_index_grid(11, 60)).unwrap();
        for c in v.as_array().unwrap() {
            assert_eq!(c["delta"].as_u64().unwrap() % 2, c["beta"].as_u64().unwrap());
        }
    }

    #[test]
    fn partial_sums_end_at_the_value() {
        let v: Value = serde_json::from_str(&l_series_partial_sums(1, 5, 300)).unwrap();
        let last = v["partial"].as_array().unwrap().last().unwrap().as_f64().unwrap();
        let value = v["value"].as_f64().unwrap();
        assert!((last - value).abs() < 1e-12 * value.abs());
        let v: Value = serde_json::from_str(&l_series_partial_sums(-1, 17, 50)).unwrap();
        assert_eq!(v["value"].as_f64().unwrap(), 0.0);
    }
}
