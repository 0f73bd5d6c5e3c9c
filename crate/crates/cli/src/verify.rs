//! The acceptance suite behind `twincurve verify`: ten criteria, each with
//! its tolerance and runtime limit pinned here.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twincurve::arith::{hilbert_symbol_local, is_fundamental_discriminant, jacobi_symbol, primes_up_to, twin_pairs_below, FactoredInteger};
use twincurve::classgroup::{class_group, compose, rank_bound, reduce_definite, reduced_definite_forms, Form};
use twincurve::curves::{CurveSpec, WeierstrassCoeffs};
use twincurve::galois::{rho_surjective, torsion_ramified_at, torsion_ramified_closed_form, Surjectivity, LARGE_PRIME_BOUND};
use twincurve::localdata::{
    anomalous_scan, count_points, count_reduced_solutions, is_split, is_supersingular, isogenous_c2, reduction_data, tate,
    Kodaira,
};
use twincurve::lseries::{
    an_coefficients, heegner_congruence, l_derivative_at_1, l_value_at_1, parity_check, root_number,
    twisted_l_value, twisted_root_number, ParityStatus,
};
use twincurve::normindex::{delta_case, delta_case_match_count, delta_components, parity_relation, selmer_parity_shift, TwistField};
use twincurve::Budgets;

use crate::oracles;
use crate::report::{self, ReportRequest};
use crate::sweep::{self, Check, SweepParams};

/// Relative agreement required between the r = 0 integral and the series.
pub const R0_RELATIVE_TOLERANCE: f64 = 1e-9;
/// Truncation points at which Cauchy stability is tested (each against twice itself).
pub const CAUCHY_TRUNCATIONS: [u64; 3] = [20, 50, 100];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: String,
    pub pass: bool,
    pub checked: usize,
    pub failures: Vec<String>,
    pub elapsed_ms: u128,
    pub limit_ms: Option<u128>,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        let limit = self.limit_ms.map(|l| format!(" (limit {} s)", l / 1000)).unwrap_or_default();
        let mut s = format!(
            "{} [{:>2}] {}: {} checks, {} failures, {:.2} s{}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.checked,
            self.failures.len(),
            self.elapsed_ms as f64 / 1000.0,
            limit
        );
        for f in self.failures.iter().take(5) {
            s.push_str("\n       ");
            s.push_str(f);
        }
        s
    }
}

struct Tally {
    checked: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { checked: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn merge(&mut self, other: Tally) {
        self.checked += other.checked;
        self.failures.extend(other.failures);
    }
}

fn par_tally<T: Sync>(items: &[T], f: impl Fn(&T, &mut Tally) + Sync + Send) -> Tally {
    items
        .par_iter()
        .map(|x| {
            let mut t = Tally::new();
            f(x, &mut t);
            t
        })
        .reduce(Tally::new, |mut a, b| {
            a.merge(b);
            a
        })
}

fn spec(e: i64, p: u64, d: i128) -> Option<CurveSpec> {
    CurveSpec::validate(e, p, p + 2, d).ok()
}

pub const TITLES: [&str; 10] = [
    "point-count tables equal brute-force counts",
    "no anomalous primes up to 10^4",
    "norm-index partition and consistency",
    "root number table equals local product",
    "worked example (p, q) = (3, 5)",
    "Tate algorithm reproduces the reduction tables",
    "class numbers against the analytic formula",
    "L-value formulas",
    "parity of known ranks",
    "module property suites",
];

pub const LIMITS_MS: [Option<u128>; 10] =
    [Some(10_000), Some(60_000), Some(30_000), Some(5_000), None, None, Some(60_000), Some(30_000), None, Some(300_000)];

pub fn run(id: u8, budgets: &Budgets) -> CriterionOutcome {
    let start = Instant::now();
    let t = match id {
        1 => point_counts(),
        2 => anomalous(budgets),
        3 => norm_index(),
        4 => root_numbers(),
        5 => worked_example(budgets),
        6 => tate_tables(),
        7 => class_numbers(budgets),
        8 => l_values(budgets),
        9 => parity(),
        10 => properties(budgets),
        _ => {
            let mut t = Tally::new();
            t.check(false, || format!("no criterion {id}"));
            t
        }
    };
    let elapsed = start.elapsed();
    let idx = (id as usize).clamp(1, 10) - 1;
    let limit = LIMITS_MS[idx];
    let in_time = limit.is_none_or(|l| elapsed <= Duration::from_millis(l as u64));
    let mut failures = t.failures;
    if !in_time {
        failures.push(format!("runtime {:.2} s over the limit", elapsed.as_secs_f64()));
    }
    CriterionOutcome {
        id,
        title: TITLES[idx].to_string(),
        pass: failures.is_empty() && t.checked > 0,
        checked: t.checked,
        failures,
        elapsed_ms: elapsed.as_millis(),
        limit_ms: limit,
    }
}

fn point_counts() -> Tally {
    let pairs: Vec<(u64, u64)> = twin_pairs_below(500);
    let ds = [1i128, 5, 7, 11, 13, 17, 35];
    par_tally(&pairs, |&(p, q), t| {
        let rows = sweep::count_rows(p, q, &ds, &[]);
        for r in rows {
            t.check(r.pass, || format!("eps={} p={} D={} {}: table {} counted {}", r.epsilon, r.p, r.d, r.check, r.expected, r.actual));
        }
    })
}

pub const ANOMALOUS_SPECS: [(i64, u64, i128); 10] =
    [(1, 5, 1), (-1, 5, 1), (1, 11, 7), (-1, 17, 1), (1, 29, 35), (-1, 41, 7), (1, 59, 1), (-1, 71, 35), (1, 101, 7), (-1, 107, 1)];

fn anomalous(budgets: &Budgets) -> Tally {
    par_tally(&ANOMALOUS_SPECS, |&(e, p, d), t| match spec(e, p, d) {
        Some(s) => {
            let r = anomalous_scan(&s, 10_000, budgets.prime_enumeration.max(10_000));
            t.check(matches!(&r, Ok(v) if v.is_empty()), || format!("eps={e} p={p} D={d}: {r:?}"));
        }
        None => t.check(false, || format!("eps={e} p={p} D={d} invalid")),
    })
}

fn norm_index() -> Tally {
    let pairs = twin_pairs_below(200);
    par_tally(&pairs, |&(p, q), t| {
        let ds = sweep::twist_values(p, q, 150);
        for r in sweep::delta_rows(p, q, &ds, true, true) {
            t.check(r.pass, || format!("p={} D={} mu={:?} {}: {} vs {}", r.p, r.d, r.mu, r.check, r.expected, r.actual));
        }
    })
}

fn root_numbers() -> Tally {
    let pairs = twin_pairs_below(1000);
    par_tally(&pairs, |&(p, q), t| {
        for r in sweep::root_number_rows(p, q) {
            t.check(r.pass, || format!("eps={} p={}: table {} product {}", r.epsilon, r.p, r.expected, r.actual));
        }
    })
}

fn worked_example(budgets: &Budgets) -> Tally {
    let mut t = Tally::new();
    for e in [1i64, -1] {
        let req = ReportRequest { epsilon: e, p: 3, q: 5, d: 1, mus: vec![], with_l_value: false };
        match report::build(&req, budgets) {
            Ok(r) => {
                t.check(r.conductor.value == 480, || format!("eps={e}: conductor {}", r.conductor.value));
                let w = r.root_number.as_ref().map(|x| x.table.value as i64);
                t.check(w == Some(-e), || format!("eps={e}: root number {w:?}"));
                let c = r.root_number.as_ref().map(|x| x.constructive.value.global as i64);
                t.check(c == Some(-e), || format!("eps={e}: local product {c:?}"));
                t.check(r.torsion.value.structure == vec![2, 2], || format!("eps={e}: torsion {:?}", r.torsion.value.structure));
            }
            Err(err) => t.check(false, || format!("eps={e}: {err}")),
        }
        let s = spec(e, 3, 1).expect("valid");
        t.check(heegner_congruence(&s, -119) == Ok(true), || format!("eps={e}: -119 not a square mod 1920"));
    }
    t.check(61 * 61 % 1920 == (-119i64).rem_euclid(1920), || "61^2 != -119 mod 1920".into());
    t
}

/// Fifty specs: the first 25 twin pairs, both signs, `D` cycling through a
/// fixed list of signed values coprime to `2pq`.
pub fn tate_specs() -> Vec<CurveSpec> {
    let ds = [1i128, 5, -7, 11, -13, 35, -3, 17, 1, -19];
    let pairs = twin_pairs_below(2000);
    let mut out = Vec::new();
    for (i, &(p, _)) in pairs.iter().take(25).enumerate() {
        for e in [1i64, -1] {
            let s = (0..ds.len()).map(|k| ds[(i + k) % ds.len()]).find_map(|d| spec(e, p, d)).expect("a coprime D exists");
            out.push(s);
        }
    }
    out
}

fn tate_tables() -> Tally {
    let specs = tate_specs();
    par_tally(&specs, |s, t| {
        let name = format!("eps={} p={} D={}", s.epsilon, s.p, s.d_value());
        let c = s.coeffs();
        let expect = |t: &mut Tally, coeffs: &WeierstrassCoeffs, l: u64, k: Kodaira, tam: u32, what: &str| {
            let r = tate(coeffs, l).map(|o| (o.data.kodaira, o.data.tamagawa));
            t.check(r == Ok((k, tam)), || format!("{name} {what} at {l}: {r:?}, expected ({k}, {tam})"));
        };
        expect(t, &c, 2, Kodaira::III, 2, "E");
        expect(t, &c, s.p, Kodaira::I(2), 2, "E");
        expect(t, &c, s.q, Kodaira::I(2), 2, "E");
        for l in s.d.primes() {
            expect(t, &c, l, Kodaira::IStar(0), 4, "E");
        }
        match s.base().isogenous_curve() {
            Ok(iso) => {
                expect(t, &iso, 2, Kodaira::IStar(3), isogenous_c2(s.epsilon, s.p), "E'");
                expect(t, &iso, s.p, Kodaira::I(1), 1, "E'");
                expect(t, &iso, s.q, Kodaira::I(1), 1, "E'");
            }
            Err(e) => t.check(false, || format!("{name}: {e}")),
        }
    })
}

fn fundamental_range(lo: i128, hi: i128) -> Vec<i128> {
    (lo..hi).filter(|&d| d != 0 && d != 1 && is_fundamental_discriminant(d)).collect()
}

fn class_numbers(budgets: &Budgets) -> Tally {
    let discs: Vec<i128> = fundamental_range(-1999, 0).into_iter().chain(fundamental_range(2, 500)).collect();
    par_tally(&discs, |&d, t| match class_group(d, budgets) {
        Ok(c) => {
            let oracle = oracles::analytic_class_number(d);
            t.check(oracle == Some(c.h), || format!("disc {d}: forms {} analytic {oracle:?}", c.h));
            if d < 0 {
                let g = oracles::prime_divisor_count(d) - 1;
                t.check(c.two_rank == g, || format!("disc {d}: 2-rank {} genus {g}", c.two_rank));
            }
        }
        Err(e) => t.check(false, || format!("disc {d}: {e}")),
    })
}

pub const CAUCHY_SPECS: [(i64, u64); 10] =
    [(1, 5), (1, 29), (-1, 3), (-1, 11), (1, 71), (-1, 59), (1, 101), (-1, 107), (1, 197), (-1, 5)];

fn l_values(budgets: &Budgets) -> Tally {
    let mut t = Tally::new();
    let pairs = twin_pairs_below(500);
    t.merge(par_tally(&pairs, |&(p, _), t| {
        for e in [1i64, -1] {
            let s = spec(e, p, 1).expect("valid");
            if root_number(&s) == Ok(-1) {
                let v = l_value_at_1(&s, None, budgets);
                t.check(matches!(&v, Ok(x) if x.value == 0.0), || format!("eps={e} p={p}: sign -1 but {v:?}"));
            }
        }
    }));
    for (e, p) in CAUCHY_SPECS {
        let s = spec(e, p, 1).expect("valid");
        t.check(root_number(&s) == Ok(1), || format!("eps={e} p={p} is not a sign +1 spec"));
        for n in CAUCHY_TRUNCATIONS {
            match (l_value_at_1(&s, Some(n), budgets), l_value_at_1(&s, Some(2 * n), budgets)) {
                (Ok(a), Ok(b)) => t.check((a.value - b.value).abs() < a.tail_bound, || {
                    format!("eps={e} p={p} N={n}: moved {:e}, tail bound {:e}", (a.value - b.value).abs(), a.tail_bound)
                }),
                (a, b) => t.check(false, || format!("eps={e} p={p}: {a:?} {b:?}")),
            }
        }
        match (l_value_at_1(&s, None, budgets), l_derivative_at_1(&s, 0, None, budgets)) {
            (Ok(a), Ok(b)) => t.check((a.value - b.value).abs() <= R0_RELATIVE_TOLERANCE * a.value.abs(), || {
                format!("eps={e} p={p}: series {} integral {}", a.value, b.value)
            }),
            (a, b) => t.check(false, || format!("eps={e} p={p}: {a:?} {b:?}")),
        }
    }
    t
}

fn parity() -> Tally {
    let pairs = twin_pairs_below(500);
    par_tally(&pairs, |&(p, _), t| {
        for e in [1i64, -1] {
            let s = spec(e, p, 1).expect("valid");
            match parity_check(&s) {
                Ok(v) => {
                    t.check(v.status != ParityStatus::Inconsistent, || format!("eps={e} p={p}: inconsistent {v:?}"));
                    if v.family.is_some() && v.rank.is_some() {
                        t.check(v.status == ParityStatus::Consistent, || format!("eps={e} p={p}: {v:?}"));
                    }
                    if v.family == Some(3) && v.witness.is_some() {
                        t.check(v.rank == Some(1), || format!("eps={e} p={p}: witness without rank"));
                    }
                }
                Err(err) => t.check(false, || format!("eps={e} p={p}: {err}")),
            }
        }
    })
}

/// One named invariant from a module's property list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyOutcome {
    pub module: String,
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

type PropertyFn = fn(&Budgets) -> Tally;

const PROPERTIES: [(&str, &str, PropertyFn); 31] = [
    ("arith", "jacobi multiplicative in the numerator", prop_jacobi_multiplicative),
    ("arith", "jacobi at primes matches square search", prop_jacobi_search),
    ("arith", "hilbert symmetric and bilinear", prop_hilbert_bilinear),
    ("arith", "hilbert matches solvability oracle", prop_hilbert_oracle),
    ("curves", "discriminant equals (c4^3 - c6^2) / 1728", prop_discriminant),
    ("curves", "sign flip twist is an involution", prop_minus_twist),
    ("curves", "2-torsion points lie on the curve", prop_two_torsion),
    ("localdata", "table counts equal enumerated counts", prop_counts),
    ("localdata", "4 divides #E(F_l) at good odd l", prop_four_divides),
    ("localdata", "supersingular iff a_l = 0", prop_supersingular),
    ("localdata", "Tate algorithm agrees with table, f = 0 at good l", prop_tate_agrees),
    ("localdata", "count at p is p iff split", prop_split_count),
    ("galois", "ramification derivation equals closed form", prop_ramification),
    ("galois", "large-prime surjectivity is monotone", prop_surjective_monotone),
    ("normindex", "exactly one classification row matches", prop_partition),
    ("normindex", "row total equals component total", prop_consistency),
    ("normindex", "2n + mu0 <= delta <= 2n + 4 + mu0", prop_bounds),
    ("normindex", "parity beta equals Selmer shift", prop_beta_shift),
    ("classgroup", "h equals the analytic class number, |disc| <= 2000", prop_class_number),
    ("classgroup", "imaginary 2-rank equals t - 1", prop_genus),
    ("classgroup", "composition is associative with principal identity", prop_composition),
    ("classgroup", "S-class 2-rank and rank bound ordering", prop_rank_bound),
    ("lseries", "root number table equals local product", prop_root_numbers),
    ("lseries", "Hasse bound and |a(n)| <= n", prop_hasse),
    ("lseries", "L(1) stable under doubling the truncation", prop_cauchy),
    ("lseries", "value clause matches root number", prop_dichotomy),
    ("lseries", "twisted value vanishes iff twisted sign is -1", prop_twisted_vanishing),
    ("lseries", "r = 0 integral equals the series", prop_r0),
    ("cli", "error kinds map to exit codes", prop_exit_codes),
    ("cli", "report JSON round-trips", prop_json_round_trip),
    ("cli", "sweep CSV is byte-identical across runs", prop_sweep_determinism),
];

pub fn run_properties(budgets: &Budgets) -> Vec<PropertyOutcome> {
    PROPERTIES
        .iter()
        .map(|(m, n, f)| {
            let t = f(budgets);
            PropertyOutcome { module: m.to_string(), name: n.to_string(), checked: t.checked, failures: t.failures }
        })
        .collect()
}

fn properties(budgets: &Budgets) -> Tally {
    let mut t = Tally::new();
    for p in run_properties(budgets) {
        t.checked += p.checked;
        if p.checked == 0 {
            t.failures.push(format!("{}: {}: nothing checked", p.module, p.name));
        }
        for f in p.failures.into_iter().take(3) {
            t.failures.push(format!("{}: {}: {f}", p.module, p.name));
        }
    }
    t
}

fn prop_jacobi_multiplicative(_: &Budgets) -> Tally {
    let ms: Vec<i128> = (3..=199).step_by(2).collect();
    par_tally(&ms, |&m, t| {
        let j: Vec<i8> = (-200..=200).map(|a| jacobi_symbol(a, m).expect("odd m")).collect();
        for a in -200i128..=200 {
            for b in -200i128..=200 {
                let lhs = jacobi_symbol(a * b, m).expect("odd m");
                let rhs = j[(a + 200) as usize] * j[(b + 200) as usize];
                t.check(lhs == rhs, || format!("({a}*{b} / {m})"));
            }
        }
    })
}

fn prop_jacobi_search(_: &Budgets) -> Tally {
    let mut t = Tally::new();
    for m in primes_up_to(200).into_iter().filter(|&m| m > 2) {
        let m = m as i128;
        for a in 1..m {
            let j = jacobi_symbol(a, m).expect("odd m");
            t.check((j == 1) == oracles::is_qr_by_search(a, m), || format!("({a} / {m})"));
        }
    }
    t
}

fn prop_hilbert_bilinear(_: &Budgets) -> Tally {
    let set = [1i128, -1, 3, -3, 5, -5, 7, -7, 2, -2, 6, -6, 10, -10, 14, -14];
    let mut t = Tally::new();
    for l in [2u64, 3, 5, 7] {
        for &a in &set {
            for &b1 in &set {
                let h = |x, y| hilbert_symbol_local(x, y, l).expect("nonzero");
                t.check(h(a, b1) == h(b1, a), || format!("({a},{b1})_{l} not symmetric"));
                for &b2 in &set {
                    t.check(h(a, b1 * b2) == h(a, b1) * h(a, b2), || format!("({a},{b1}*{b2})_{l} not bilinear"));
                }
            }
        }
    }
    t
}

fn prop_hilbert_oracle(_: &Budgets) -> Tally {
    let set = [1i128, -1, 2, -2, 3, -3, 5, -5, 6, -6, 7, -7, 10, -10];
    let mut t = Tally::new();
    for l in [2u64, 3, 5, 7] {
        for &a in &set {
            for &b in &set {
                let fast = hilbert_symbol_local(a, b, l).expect("nonzero");
                t.check(fast == oracles::hilbert_by_solvability(a, b, l), || format!("({a},{b})_{l}"));
            }
        }
    }
    t
}

/// Both signs, twin pairs below 200, a fixed list of signed `D`.
fn sweep_set() -> Vec<CurveSpec> {
    let ds = [1i128, -1, 5, -5, 7, -7, 11, 13, -15, 35, -51];
    let mut out = Vec::new();
    for (p, _) in twin_pairs_below(200) {
        for e in [1, -1] {
            out.extend(ds.iter().filter_map(|&d| spec(e, p, d)));
        }
    }
    out
}

fn prop_discriminant(_: &Budgets) -> Tally {
    par_tally(&sweep_set(), |s, t| {
        let c = s.coeffs();
        // b-invariants recomputed from the long coefficients
        let b2 = c.a1 * c.a1 + 4 * c.a2;
        let b4 = 2 * c.a4 + c.a1 * c.a3;
        let b6 = c.a3 * c.a3 + 4 * c.a6;
        let c4 = b2 * b2 - 24 * b4;
        let c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
        let disc = s.invariants().map(|i| i.discriminant);
        let ok = match disc {
            Ok(dv) => c4.checked_pow(3).zip(c6.checked_pow(2)).map(|(x, y)| x - y == 1728 * dv).unwrap_or(false),
            Err(_) => false,
        };
        t.check(ok, || format!("eps={} p={} D={}", s.epsilon, s.p, s.d_value()));
    })
}

fn prop_minus_twist(_: &Budgets) -> Tally {
    let mut t = Tally::new();
    for s in sweep_set() {
        let m = s.minus_twist();
        t.check(m.minus_twist() == s && m.coeffs() == CurveSpec::validate(-(s.epsilon as i64), s.p, s.q, s.d_value()).map(|x| x.coeffs()).unwrap_or(m.coeffs()), || {
            format!("eps={} p={} D={}", s.epsilon, s.p, s.d_value())
        });
    }
    t
}

fn prop_two_torsion(_: &Budgets) -> Tally {
    let mut t = Tally::new();
    for s in sweep_set().into_iter().take(100) {
        let c = s.coeffs();
        for (x, y) in s.two_torsion_points() {
            let lhs = y * y + c.a1 * x * y + c.a3 * y;
            let rhs = x * x * x + c.a2 * x * x + c.a4 * x + c.a6;
            t.check(lhs == rhs, || format!("({x}, {y}) off eps={} p={} D={}", s.epsilon, s.p, s.d_value()));
        }
    }
    t
}

fn prop_counts(_: &Budgets) -> Tally {
    let pairs: Vec<(u64, u64)> = twin_pairs_below(500);
    par_tally(&pairs, |&(p, q), t| {
        for r in sweep::count_rows(p, q, &[1, 5, 7, 11, 13, 35], &[p, q]) {
            t.check(r.pass, || format!("p={} D={} eps={} {}", r.p, r.d, r.epsilon, r.check));
        }
    })
}

fn prop_four_divides(budgets: &Budgets) -> Tally {
    par_tally(&sweep_set(), |s, t| {
        for l in primes_up_to(300).into_iter().filter(|&l| l > 2 && !s.is_bad_prime(l)) {
            let c = count_points(s, l, budgets.prime_enumeration).map(|c| c.count);
            t.check(matches!(c, Ok(n) if n % 4 == 0), || format!("p={} D={} l={l}: {c:?}", s.p, s.d_value()));
        }
    })
}

fn prop_supersingular(budgets: &Budgets) -> Tally {
    par_tally(&sweep_set(), |s, t| {
        for l in primes_up_to(200).into_iter().filter(|&l| l >= 5 && !s.is_bad_prime(l)) {
            let ss = is_supersingular(s, l);
            let a = count_points(s, l, budgets.prime_enumeration).map(|c| c.trace);
            t.check(matches!((&ss, &a), (Ok(x), Ok(y)) if *x == (*y == 0)), || format!("p={} D={} l={l}", s.p, s.d_value()));
        }
    })
}

fn prop_tate_agrees(_: &Budgets) -> Tally {
    par_tally(&sweep_set(), |s, t| {
        let c = s.coeffs();
        for l in s.bad_primes() {
            let table = reduction_data(s, l);
            let alg = tate(&c, l).map(|o| o.data);
            let ok = matches!((&table, &alg), (Ok(a), Ok(b)) if a.kodaira == b.kodaira && a.tamagawa == b.tamagawa && a.conductor_exponent == b.conductor_exponent);
            t.check(ok, || format!("p={} D={} l={l}: {table:?} vs {alg:?}", s.p, s.d_value()));
        }
        for l in primes_up_to(50).into_iter().filter(|&l| !s.is_bad_prime(l)) {
            let f = tate(&c, l).map(|o| o.data.conductor_exponent);
            t.check(f == Ok(0), || format!("p={} D={} good l={l}: f = {f:?}", s.p, s.d_value()));
        }
    })
}

fn prop_split_count(_: &Budgets) -> Tally {
    par_tally(&sweep_set(), |s, t| {
        for l in [s.p, s.q] {
            let n = count_reduced_solutions(s, l);
            let split = is_split(s, l) == Some(true);
            t.check((n == l) == split && (n == l || n == l + 2), || format!("p={} D={} l={l}: count {n}, split {split}", s.p, s.d_value()));
        }
    })
}

fn prop_ramification(_: &Budgets) -> Tally {
    let mut t = Tally::new();
    for s in sweep_set() {
        for l in primes_up_to(50) {
            for at in [s.p, s.q] {
                let v = torsion_ramified_at(&s, l, at).map(|v| v.ramified);
                t.check(v == Ok(torsion_ramified_closed_form(l, at)), || format!("p={} l={l} at={at}", s.p));
            }
        }
    }
    t
}

fn prop_surjective_monotone(_: &Budgets) -> Tally {
    let big: Vec<u64> = primes_up_to(5000).into_iter().filter(|&l| l > 3000).collect();
    let mut t = Tally::new();
    for s in sweep_set() {
        let mut seen = false;
        for &l in &big {
            let v = rho_surjective(&s, l).map(|v| v.status);
            let sur = v == Ok(Surjectivity::Surjective);
            if seen && !s.is_bad_prime(l) {
                t.check(sur, || format!("p={} D={} l={l}", s.p, s.d_value()));
            }
            seen |= sur && l > LARGE_PRIME_BOUND;
        }
    }
    t
}

fn delta_inputs() -> Vec<(CurveSpec, TwistField)> {
    let mut out = Vec::new();
    for (p, q) in twin_pairs_below(200) {
        let s = spec(1, p, 1).expect("valid");
        for d in sweep::twist_values(p, q, 150) {
            for mu in [1i64, -1] {
                if mu == 1 && d == 1 {
                    continue;
                }
                if let Ok(f) = TwistField::new(mu, d) {
                    out.push((s.clone(), f));
                }
            }
        }
    }
    out
}

fn prop_partition(_: &Budgets) -> Tally {
    par_tally(&delta_inputs(), |(s, f), t| {
        let n = delta_case_match_count(s, f);
        t.check(n == 1, || format!("p={} muD={}: {n} rows", s.p, f.md()));
    })
}

fn prop_consistency(_: &Budgets) -> Tally {
    par_tally(&delta_inputs(), |(s, f), t| {
        let a = delta_case(s, f).map(|c| c.total);
        let b = delta_components(s, f).map(|c| c.total);
        t.check(a.is_ok() && a == b, || format!("p={} muD={}: {a:?} vs {b:?}", s.p, f.md()));
    })
}

fn prop_bounds(_: &Budgets) -> Tally {
    par_tally(&delta_inputs(), |(s, f), t| {
        let lo = 2 * f.n() + f.mu0 as u32;
        let v = delta_components(s, f).map(|c| c.total);
        t.check(matches!(v, Ok(x) if x >= lo && x <= lo + 4), || format!("p={} muD={}: {v:?}", s.p, f.md()));
    })
}

fn prop_beta_shift(_: &Budgets) -> Tally {
    par_tally(&delta_inputs(), |(s, f), t| {
        let b = parity_relation(s, f).map(|r| r.beta);
        let sh = selmer_parity_shift(s, f).map(|r| r.s);
        let delta = delta_components(s, f).map(|c| (c.total % 2) as u8);
        t.check(b.is_ok() && b == sh && b == delta, || format!("p={} muD={}: {b:?} {sh:?} {delta:?}", s.p, f.md()));
    })
}

fn prop_class_number(budgets: &Budgets) -> Tally {
    let discs: Vec<i128> = fundamental_range(-2000, 2001);
    par_tally(&discs, |&d, t| {
        let h = class_group(d, budgets).map(|c| c.h);
        let o = oracles::analytic_class_number(d);
        t.check(h.is_ok() && h.clone().ok() == o, || format!("disc {d}: {h:?} vs {o:?}"));
    })
}

fn prop_genus(budgets: &Budgets) -> Tally {
    par_tally(&fundamental_range(-1999, 0), |&d, t| {
        let r = class_group(d, budgets).map(|c| c.two_rank);
        t.check(r == Ok(oracles::prime_divisor_count(d) - 1), || format!("disc {d}: {r:?}"));
    })
}

fn prop_composition(_: &Budgets) -> Tally {
    let mut t = Tally::new();
    for d in [-5460i128, -3299, -4027, -1155, -84, -23] {
        let forms = reduced_definite_forms(d).unwrap_or_default();
        t.check(!forms.is_empty(), || format!("disc {d}: no forms"));
        let mul = |f: Form, g: Form| compose(f, g).map(reduce_definite);
        let id = Form::principal(d);
        for (i, &f) in forms.iter().enumerate() {
            t.check(mul(f, id) == Ok(f), || format!("disc {d}: {f:?} * 1"));
            for &g in forms.iter().skip(i % 3).step_by(3) {
                let closed = mul(f, g).map(|x| forms.contains(&x));
                t.check(closed == Ok(true), || format!("disc {d}: {f:?} * {g:?} not a reduced form"));
                for &h in forms.iter().step_by(7) {
                    let l = mul(f, g).and_then(|x| mul(x, h));
                    let r = mul(g, h).and_then(|x| mul(f, x));
                    t.check(l.is_ok() && l == r, || format!("disc {d}: ({f:?} {g:?} {h:?})"));
                }
            }
        }
    }
    t
}

fn prop_rank_bound(budgets: &Budgets) -> Tally {
    let pairs = twin_pairs_below(60);
    par_tally(&pairs, |&(p, _), t| {
        let s = spec(1, p, 1).expect("valid");
        for d in (3i128..300).step_by(2) {
            let Ok(f) = FactoredInteger::from_i128(d) else { continue };
            if !f.is_squarefree() {
                continue;
            }
            match rank_bound(&s, &f, budgets) {
                Ok(r) => t.check(r.sharp <= r.headline && r.s_class.s_two_rank <= r.s_class.base.two_rank && r.s_class.s_set_size <= 8, || {
                    format!("p={p} D={d}: {r:?}")
                }),
                Err(e) => t.check(false, || format!("p={p} D={d}: {e}")),
            }
        }
    })
}

fn prop_root_numbers(_: &Budgets) -> Tally {
    root_numbers()
}

fn prop_hasse(budgets: &Budgets) -> Tally {
    let specs: Vec<CurveSpec> = [(1i64, 3u64), (-1, 5), (1, 71), (-1, 137)].iter().filter_map(|&(e, p)| spec(e, p, 1)).collect();
    par_tally(&specs, |s, t| match an_coefficients(s, 10_000, budgets) {
        Ok(a) => {
            for l in primes_up_to(10_000).into_iter().filter(|&l| !s.is_bad_prime(l)) {
                let al = a[l as usize] as f64;
                t.check(al.abs() <= 2.0 * (l as f64).sqrt(), || format!("p={} a({l}) = {al}", s.p));
            }
            for (n, &x) in a.iter().enumerate().skip(1) {
                t.check(x.unsigned_abs() <= n as u64, || format!("p={} a({n}) = {x}", s.p));
            }
        }
        Err(e) => t.check(false, || format!("p={}: {e}", s.p)),
    })
}

fn prop_cauchy(budgets: &Budgets) -> Tally {
    let mut t = Tally::new();
    for (e, p) in CAUCHY_SPECS {
        let s = spec(e, p, 1).expect("valid");
        for n in CAUCHY_TRUNCATIONS {
            let (a, b) = (l_value_at_1(&s, Some(n), budgets), l_value_at_1(&s, Some(2 * n), budgets));
            t.check(matches!((&a, &b), (Ok(x), Ok(y)) if (x.value - y.value).abs() < x.tail_bound), || format!("p={p} N={n}"));
        }
    }
    t
}

fn prop_dichotomy(budgets: &Budgets) -> Tally {
    let mut t = Tally::new();
    for (p, _) in twin_pairs_below(1000) {
        for e in [1i64, -1] {
            let s = spec(e, p, 1).expect("valid");
            let tag = l_value_at_1(&s, Some(10), budgets).map(|v| v.formula_tag.contains("sign-plus"));
            t.check(tag == root_number(&s).map(|w| w == 1), || format!("eps={e} p={p}"));
        }
    }
    t
}

fn prop_twisted_vanishing(budgets: &Budgets) -> Tally {
    let pairs = twin_pairs_below(100);
    par_tally(&pairs, |&(p, _), t| {
        for e in [1i64, -1] {
            let s = spec(e, p, 1).expect("valid");
            for d in (3i128..100).step_by(2) {
                for mu in [1i64, -1] {
                    let Ok(f) = TwistField::new(mu, d) else { continue };
                    let Ok(w) = twisted_root_number(&s, &f) else { continue };
                    let v = twisted_l_value(&s, &f, Some(30), budgets);
                    t.check(matches!(&v, Ok(x) if (x.formula_tag == "twisted:prefactor-zero") == (w == -1)), || {
                        format!("eps={e} p={p} muD={}", f.md())
                    });
                }
            }
        }
    })
}

fn prop_r0(budgets: &Budgets) -> Tally {
    let mut t = Tally::new();
    for (p, _) in twin_pairs_below(300) {
        for e in [1i64, -1] {
            let s = spec(e, p, 1).expect("valid");
            let (a, b) = (l_value_at_1(&s, None, budgets), l_derivative_at_1(&s, 0, None, budgets));
            t.check(
                matches!((&a, &b), (Ok(x), Ok(y)) if (x.value - y.value).abs() <= R0_RELATIVE_TOLERANCE * x.value.abs()),
                || format!("eps={e} p={p}: {a:?} {b:?}"),
            );
        }
    }
    t
}

fn prop_exit_codes(_: &Budgets) -> Tally {
    use crate::CliError;
    use twincurve::Error as E;
    let mut t = Tally::new();
    let cases = [
        (CliError::Core(E::Twist("D".into())), crate::EXIT_VALIDATION),
        (CliError::Core(E::Primality(9)), crate::EXIT_VALIDATION),
        (CliError::Core(E::Domain("x".into())), crate::EXIT_VALIDATION),
        (CliError::Core(E::Range("x".into())), crate::EXIT_BUDGET),
        (CliError::Core(E::Inconsistent("x".into())), crate::EXIT_CHECK_FAILED),
        (CliError::ChecksFailed(1), crate::EXIT_CHECK_FAILED),
    ];
    for (e, code) in cases {
        t.check(e.exit_code() == code, || format!("{e} -> {}", e.exit_code()));
    }
    t
}

fn prop_json_round_trip(budgets: &Budgets) -> Tally {
    let mut t = Tally::new();
    for (e, p, d, mus) in [(1i64, 3u64, 1i128, vec![]), (-1, 11, 5, vec![1i64, -1]), (1, 17, -7, vec![1]), (-1, 29, 1, vec![])] {
        let req = ReportRequest { epsilon: e, p, q: p + 2, d, mus, with_l_value: true };
        let ok = report::build(&req, budgets).ok().is_some_and(|r| {
            serde_json::to_string(&r)
                .ok()
                .and_then(|s| serde_json::from_str::<report::CurveReport>(&s).ok())
                .is_some_and(|back| back == r)
        });
        t.check(ok, || format!("eps={e} p={p} D={d}"));
    }
    t
}

fn prop_sweep_determinism(budgets: &Budgets) -> Tally {
    let mut t = Tally::new();
    let params = SweepParams { p_max: 120, d_max: 40, l_max: 200, checks: Check::ALL.to_vec() };
    let a = sweep::run(&params, budgets).and_then(|(r, _)| sweep::to_csv(&r));
    let b = sweep::run(&params, budgets).and_then(|(r, _)| sweep::to_csv(&r));
    t.check(matches!((&a, &b), (Ok(x), Ok(y)) if x == y && !x.is_empty()), || "CSV differs between runs".into());
    t
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub criteria: Vec<CriterionOutcome>,
    pub passed: usize,
    pub failed: usize,
}

/// Runs the listed criteria in order; an empty list means all ten.
pub fn run_all(ids: &[u8], budgets: &Budgets) -> VerifyReport {
    let ids: Vec<u8> = if ids.is_empty() { (1..=10).collect() } else { ids.to_vec() };
    let criteria: Vec<CriterionOutcome> = ids.iter().map(|&i| run(i, budgets)).collect();
    let passed = criteria.iter().filter(|c| c.pass).count();
    VerifyReport { failed: criteria.len() - passed, passed, criteria }
}
