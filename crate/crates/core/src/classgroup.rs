//! Class groups of quadratic fields through binary quadratic forms.
//!
//! Imaginary fields use reduced positive definite forms. Real fields use
//! cycles of reduced indefinite forms under the reduction operator `rho`; the
//! cycles give the narrow class group, and the wide group is its quotient by
//! the class of `-1` times the principal form. The S-class group is a further
//! quotient by the classes of the primes above `2, p, q`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::arith::{factor, is_fundamental_discriminant, isqrt, kronecker_unchecked, FactoredInteger};
use crate::curves::CurveSpec;
use crate::error::{Error, Result};

/// `a x^2 + b xy + c y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Form {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl Form {
    pub fn new(a: i128, b: i128, c: i128) -> Self {
        Form { a, b, c }
    }

    pub fn disc(&self) -> i128 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn principal(disc: i128) -> Self {
        let b = disc.rem_euclid(2);
        Form::new(1, b, (b * b - disc) / 4)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupData {
    pub disc: i128,
    pub h: u64,
    /// Invariant factors `d_1 | d_2 | ...`, all greater than 1.
    pub elementary_divisors: Vec<u64>,
    pub two_rank: u32,
    /// Real fields only.
    pub narrow_class_number: Option<u64>,
    /// Real fields only: norm of the fundamental unit.
    pub fundamental_unit_norm: Option<i8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SPlace {
    pub l: u64,
    pub splitting: Splitting,
    /// A form representing a prime above `l`, when the prime is not inert.
    pub form: Option<Form>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SClassData {
    pub base: ClassGroupData,
    pub s_primes: Vec<SPlace>,
    pub s_two_rank: u32,
    /// Number of places in S, infinite ones included.
    pub s_set_size: u32,
    pub s_class_number: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankBound {
    /// `14 + 2 dim Cl_S(K)[2]`.
    pub headline: u32,
    /// `2 (#S + dim Cl_S(K)[2]) - 2`.
    pub sharp: u32,
    pub s_class: SClassData,
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Composition of two forms with positive leading coefficient and equal
/// discriminant (unreduced result).
pub fn compose(f1: Form, f2: Form) -> Result<Form> {
    let disc = f1.disc();
    let (f1, f2) = if f1.a > f2.a { (f2, f1) } else { (f1, f2) };
    let s = (f1.b + f2.b) / 2;
    let n = f2.b - s;
    let (y1, d) = if f2.a % f1.a == 0 {
        (0, f1.a)
    } else {
        let (g, u, _) = ext_gcd(f2.a, f1.a);
        (u, g)
    };
    let (x2, y2, d1) = if s % d == 0 {
        (0, -1, d)
    } else {
        let (g, u, v) = ext_gcd(s, d);
        (u, -v, g)
    };
    let v1 = f1.a / d1;
    let v2 = f2.a / d1;
    let r = (y1 * y2 * n - x2 * f2.c).rem_euclid(v1);
    let b3 = f2.b + 2 * v2 * r;
    let a3 = v1 * v2;
    let num = b3 * b3 - disc;
    if num % (4 * a3) != 0 {
        return Err(Error::Inconsistent(format!("composition of {f1:?} and {f2:?} is not integral")));
    }
    Ok(Form::new(a3, b3, num / (4 * a3)))
}

/// Reduced representative of a positive definite form.
pub fn reduce_definite(f: Form) -> Form {
    let Form { mut a, mut b, mut c } = f;
    let d = f.disc();
    loop {
        if b > a || b <= -a {
            let two_a = 2 * a;
            let mut r = b.rem_euclid(two_a);
            if r > a {
                r -= two_a;
            }
            b = r;
            c = (b * b - d) / (4 * a);
        }
        if a > c {
            (a, b, c) = (c, -b, a);
            continue;
        }
        if a == c && b < 0 {
            b = -b;
        }
        return Form::new(a, b, c);
    }
}

/// Reduced positive definite forms of a negative discriminant, one per class.
pub fn reduced_definite_forms(disc: i128) -> Result<Vec<Form>> {
    if disc >= 0 || disc.rem_euclid(4) > 1 {
        return Err(Error::Domain(format!("{disc} is not a negative discriminant")));
    }
    Ok(FormGroup::imaginary(disc).reps)
}

struct Indefinite {
    disc: i128,
    s: i128,
}

impl Indefinite {
    fn new(disc: i128) -> Self {
        Indefinite { disc, s: isqrt(disc as u128) as i128 }
    }

    /// `|sqrt D - 2|a|| < b < sqrt D`.
    fn is_reduced(&self, f: Form) -> bool {
        let a2 = 2 * f.a.abs();
        f.b > 0 && f.b <= self.s && a2 - f.b <= self.s && self.s < a2 + f.b
    }

    /// The representative `r = b mod 2|a|` used by `rho`.
    fn normalize(&self, b: i128, a: i128) -> i128 {
        let (aa, a2) = (a.abs(), 2 * a.abs());
        if aa > self.s {
            let mut r = b.rem_euclid(a2);
            if r > aa {
                r -= a2;
            }
            r
        } else {
            self.s - (self.s - b).rem_euclid(a2)
        }
    }

    fn rho(&self, f: Form) -> Form {
        let r = self.normalize(-f.b, f.c);
        Form::new(f.c, r, (r * r - self.disc) / (4 * f.c))
    }

    fn reduce(&self, mut f: Form) -> Form {
        while !self.is_reduced(f) {
            f = self.rho(f);
        }
        f
    }

    fn reduced_forms(&self) -> Vec<Form> {
        let mut out = Vec::new();
        let parity = self.disc.rem_euclid(2);
        let mut b = if parity == 0 { 2 } else { 1 };
        while b <= self.s {
            let m = (self.disc - b * b) / 4;
            let mut k = 1;
            while k * k <= m {
                if m % k == 0 {
                    for a in [k, m / k] {
                        for sa in [a, -a] {
                            let f = Form::new(sa, b, -m / sa);
                            if self.is_reduced(f) && !out.contains(&f) {
                                out.push(f);
                            }
                        }
                    }
                }
                k += 1;
            }
            b += 2;
        }
        out
    }
}

/// A finite abelian group of form classes, elements labelled `0..order`.
struct FormGroup {
    disc: i128,
    reps: Vec<Form>,
    lookup: HashMap<Form, usize>,
    real: Option<Indefinite>,
}

impl FormGroup {
    fn imaginary(disc: i128) -> Self {
        let mut reps = Vec::new();
        let mut a = 1i128;
        while 3 * a * a <= -disc {
            for b in -a + 1..=a {
                if (b - disc).rem_euclid(2) != 0 {
                    continue;
                }
                let num = b * b - disc;
                if num % (4 * a) != 0 {
                    continue;
                }
                let c = num / (4 * a);
                if c < a || (c == a && b < 0) {
                    continue;
                }
                reps.push(Form::new(a, b, c));
            }
            a += 1;
        }
        let lookup = reps.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        FormGroup { disc, reps, lookup, real: None }
    }

    fn real_narrow(disc: i128) -> Self {
        let ind = Indefinite::new(disc);
        let mut reps = Vec::new();
        let mut lookup = HashMap::new();
        for f in ind.reduced_forms() {
            if lookup.contains_key(&f) {
                continue;
            }
            let idx = reps.len();
            reps.push(f);
            let mut g = f;
            loop {
                lookup.insert(g, idx);
                g = ind.rho(g);
                if g == f {
                    break;
                }
            }
        }
        FormGroup { disc, reps, lookup, real: Some(ind) }
    }

    fn order(&self) -> usize {
        self.reps.len()
    }

    fn class_of(&self, f: Form) -> Result<usize> {
        let r = match &self.real {
            None => reduce_definite(f),
            Some(ind) => ind.reduce(f),
        };
        self.lookup
            .get(&r)
            .copied()
            .ok_or_else(|| Error::Inconsistent(format!("reduced form {r:?} not enumerated")))
    }

    /// An equivalent form with positive leading coefficient.
    fn positive(f: Form) -> Form {
        if f.a > 0 {
            f
        } else if f.c > 0 {
            Form::new(f.c, -f.b, f.a)
        } else {
            Form::new(f.a + f.b + f.c, f.b + 2 * f.c, f.c)
        }
    }

    fn mul(&self, i: usize, j: usize) -> Result<usize> {
        let (f, g) = (Self::positive(self.reps[i]), Self::positive(self.reps[j]));
        self.class_of(compose(f, g)?)
    }

    fn identity(&self) -> Result<usize> {
        self.class_of(Form::principal(self.disc))
    }

    fn pow(&self, x: usize, mut k: u64) -> Result<usize> {
        let mut acc = self.identity()?;
        let mut base = x;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base)?;
            }
            base = self.mul(base, base)?;
            k >>= 1;
        }
        Ok(acc)
    }

    /// Subgroup generated by `gens`, as a membership mask.
    fn subgroup(&self, gens: &[usize]) -> Result<Vec<bool>> {
        let mut member = vec![false; self.order()];
        let id = self.identity()?;
        member[id] = true;
        let mut frontier = vec![id];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g)?;
                if !member[y] {
                    member[y] = true;
                    frontier.push(y);
                }
            }
        }
        Ok(member)
    }

    /// Invariant factors of `G / H`.
    fn quotient_structure(&self, h: &[bool]) -> Result<Vec<u64>> {
        let hsize = h.iter().filter(|&&m| m).count() as u64;
        let qorder = self.order() as u64 / hsize;
        // exponents[l] lists the exponents of the cyclic l-parts
        let mut factors: Vec<Vec<u64>> = Vec::new();
        for (l, e) in factor(qorder as u128)? {
            let l = l as u64;
            let mut prev = 1u64;
            let mut counts = Vec::new();
            let mut lk = 1u64;
            for _ in 1..=e {
                lk *= l;
                let mut n = 0u64;
                for x in 0..self.order() {
                    if h[self.pow(x, lk)?] {
                        n += 1;
                    }
                }
                let n = n / hsize;
                counts.push(ilog(n / prev, l));
                prev = n;
                if n == l.pow(e) {
                    break;
                }
            }
            // counts[k] = number of cyclic l-factors of order >= l^(k+1)
            let mut parts = Vec::new();
            for k in 0..counts.len() {
                let at_least = counts[k];
                let more = counts.get(k + 1).copied().unwrap_or(0);
                for _ in 0..at_least - more {
                    parts.push(l.pow(k as u32 + 1));
                }
            }
            factors.push(parts);
        }
        // Combine l-parts into invariant factors d_1 | d_2 | ...
        let width = factors.iter().map(Vec::len).max().unwrap_or(0);
        let mut inv = vec![1u64; width];
        for mut parts in factors {
            parts.sort_unstable_by(|a, b| b.cmp(a));
            for (i, x) in parts.into_iter().enumerate() {
                inv[width - 1 - i] *= x;
            }
        }
        Ok(inv)
    }

    fn trivial_mask(&self) -> Result<Vec<bool>> {
        let mut m = vec![false; self.order()];
        m[self.identity()?] = true;
        Ok(m)
    }
}

fn ilog(n: u64, l: u64) -> u64 {
    let mut k = 0;
    let mut x = n;
    while x > 1 {
        x /= l;
        k += 1;
    }
    k
}

fn two_rank_of(inv: &[u64]) -> u32 {
    inv.iter().filter(|&&d| d % 2 == 0).count() as u32
}

/// Norm of the fundamental unit of the real quadratic field of
/// discriminant `disc`, from the parity of the continued fraction period of
/// its ring generator.
pub fn fundamental_unit_norm(disc: i128) -> Result<i8> {
    if disc <= 1 || !is_fundamental_discriminant(disc) {
        return Err(Error::Domain(format!("{disc} is not a real fundamental discriminant")));
    }
    let (delta, p0, q0) = if disc % 4 == 0 { (disc / 4, 0i128, 1i128) } else { (disc, 1, 2) };
    let s = isqrt(delta as u128) as i128;
    let step = |p: i128, q: i128| {
        let a = (p + s).div_euclid(q);
        let p1 = a * q - p;
        (p1, (delta - p1 * p1) / q)
    };
    let first = step(p0, q0);
    let mut state = first;
    let mut period = 0u64;
    loop {
        state = step(state.0, state.1);
        period += 1;
        if state == first {
            break;
        }
        if period > 10 * delta as u64 {
            return Err(Error::Numeric("continued fraction period not found".into()));
        }
    }
    Ok(if period % 2 == 1 { -1 } else { 1 })
}

fn check_disc(disc: i128, budgets: &crate::Budgets) -> Result<()> {
    if disc == 1 || !is_fundamental_discriminant(disc) {
        return Err(Error::Domain(format!("{disc} is not a fundamental discriminant")));
    }
    let bound = if disc < 0 { budgets.class_group_imaginary } else { budgets.class_group_real };
    if disc.unsigned_abs() > bound as u128 {
        return Err(Error::Range(format!("|disc| = {} exceeds the class group bound {bound}", disc.abs())));
    }
    Ok(())
}

/// The wide class group as a form group plus the subgroup to quotient by.
fn wide_group(disc: i128) -> Result<(FormGroup, Vec<bool>)> {
    if disc < 0 {
        let g = FormGroup::imaginary(disc);
        let h = g.trivial_mask()?;
        Ok((g, h))
    } else {
        let g = FormGroup::real_narrow(disc);
        let p = Form::principal(disc);
        let minus = g.class_of(Form::new(-p.a, p.b, -p.c))?;
        let h = g.subgroup(&[minus])?;
        Ok((g, h))
    }
}

pub fn class_group(disc: i128, budgets: &crate::Budgets) -> Result<ClassGroupData> {
    check_disc(disc, budgets)?;
    let (g, kernel) = wide_group(disc)?;
    let inv = g.quotient_structure(&kernel)?;
    let h: u64 = inv.iter().product();
    let (narrow, unit_norm) = if disc > 0 {
        let norm = fundamental_unit_norm(disc)?;
        let narrow = g.order() as u64;
        let expected = if norm == 1 { 2 * h } else { h };
        if narrow != expected {
            return Err(Error::Inconsistent(format!(
                "narrow class number {narrow} does not match h = {h} with unit norm {norm}"
            )));
        }
        (Some(narrow), Some(norm))
    } else {
        (None, None)
    };
    Ok(ClassGroupData {
        disc,
        h,
        two_rank: two_rank_of(&inv),
        elementary_divisors: inv,
        narrow_class_number: narrow,
        fundamental_unit_norm: unit_norm,
    })
}

/// Number of prime divisors of a fundamental discriminant.
pub fn prime_divisor_count(disc: i128) -> Result<u32> {
    Ok(factor(disc.unsigned_abs())?.len() as u32)
}

fn splitting(disc: i128, l: u64) -> Splitting {
    match kronecker_unchecked(disc, l as i128) {
        1 => Splitting::Split,
        -1 => Splitting::Inert,
        _ => Splitting::Ramified,
    }
}

/// A form `(l, b, c)` representing a prime ideal above `l`.
fn prime_form(disc: i128, l: u64) -> Option<Form> {
    let l = l as i128;
    (0..2 * l)
        .filter(|b| (b - disc).rem_euclid(2) == 0)
        .find(|b| (b * b - disc).rem_euclid(4 * l) == 0)
        .map(|b| Form::new(l, b, (b * b - disc) / (4 * l)))
}

pub fn s_class_group(disc: i128, p: u64, q: u64, budgets: &crate::Budgets) -> Result<SClassData> {
    let base = class_group(disc, budgets)?;
    let (g, kernel) = wide_group(disc)?;
    let mut gens: Vec<usize> = (0..g.order()).filter(|&x| kernel[x]).collect();
    let mut places = Vec::new();
    let mut size = if disc < 0 { 1 } else { 2 };
    for l in [2, p, q] {
        let sp = splitting(disc, l);
        let form = if sp == Splitting::Inert { None } else { prime_form(disc, l) };
        if sp != Splitting::Inert && form.is_none() {
            return Err(Error::Inconsistent(format!("no prime form above {l} for disc {disc}")));
        }
        if let Some(f) = form {
            gens.push(g.class_of(f)?);
        }
        size += if sp == Splitting::Split { 2 } else { 1 };
        places.push(SPlace { l, splitting: sp, form });
    }
    let sub = g.subgroup(&gens)?;
    let inv = g.quotient_structure(&sub)?;
    let s_two_rank = two_rank_of(&inv);
    if s_two_rank > base.two_rank {
        return Err(Error::Inconsistent("S-class 2-rank exceeds class 2-rank".into()));
    }
    Ok(SClassData {
        base,
        s_primes: places,
        s_two_rank,
        s_set_size: size,
        s_class_number: inv.iter().product(),
    })
}

/// Rank bound for `E(K)`, `K = Q(sqrt D)`, `D > 1`.
pub fn rank_bound(spec: &CurveSpec, d: &FactoredInteger, budgets: &crate::Budgets) -> Result<RankBound> {
    let dv = d.value()?;
    if dv <= 1 {
        return Err(Error::Domain(format!("the bound is stated for real fields Q(sqrt D), D > 1; got {dv}")));
    }
    if !d.is_squarefree() {
        return Err(Error::Twist(format!("D = {dv} is not square-free")));
    }
    let disc = if dv % 4 == 1 { dv } else { 4 * dv };
    let s = s_class_group(disc, spec.p, spec.q, budgets)?;
    let headline = 14 + 2 * s.s_two_rank;
    let sharp = 2 * (s.s_set_size + s.s_two_rank) - 2;
    if s.s_set_size > 8 || sharp > headline {
        return Err(Error::Inconsistent(format!("#S = {} exceeds 8", s.s_set_size)));
    }
    Ok(RankBound { headline, sharp, s_class: s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Budgets;
    use std::f64::consts::PI;

    fn cg(d: i128) -> ClassGroupData {
        class_group(d, &Budgets::default()).unwrap()
    }

    /// Class number from the analytic formula.
    fn analytic_h(d: i128) -> u64 {
        if d < 0 {
            let m = -d;
            let w = match d {
                -3 => 6,
                -4 => 4,
                _ => 2,
            };
            let s: i128 = (1..m).map(|n| kronecker_unchecked(d, n) as i128 * n).sum();
            (w * s.abs() / (2 * m)) as u64
        } else {
            let s: f64 = (1..d)
                .map(|n| kronecker_unchecked(d, n) as f64 * (PI * n as f64 / d as f64).sin().ln())
                .sum();
            let reg = unit_by_convergents(d).2;
            (-s / (2.0 * reg)).round() as u64
        }
    }

    /// Fundamental unit `(x, y)` and its regulator, from continued-fraction
    /// convergents of the ring generator.
    fn unit_by_convergents(d: i128) -> (i128, i128, f64) {
        let (delta, p0, q0) = if d % 4 == 0 { (d / 4, 0i128, 1i128) } else { (d, 1, 2) };
        let s = isqrt(delta as u128) as i128;
        let (mut p, mut q) = (p0, q0);
        // a_cur / b_cur is the current convergent
        let (mut a_prev, mut a_cur, mut b_prev, mut b_cur) = (0i128, 1i128, 1i128, 0i128);
        loop {
            let a = (p + s).div_euclid(q);
            (a_prev, a_cur) = (a_cur, a * a_cur + a_prev);
            (b_prev, b_cur) = (b_cur, a * b_cur + b_prev);
            let p1 = a * q - p;
            q = (delta - p1 * p1) / q;
            p = p1;
            // element A - B * conj(omega)
            let (x2, y2, norm4) = if d % 4 == 0 {
                (2 * a_cur, 2 * b_cur, a_cur * a_cur - delta * b_cur * b_cur)
            } else {
                let x = 2 * a_cur - b_cur;
                (x, b_cur, (x * x - delta * b_cur * b_cur) / 4)
            };
            if norm4 == 1 || norm4 == -1 {
                let eps = (x2 as f64 + y2 as f64 * (delta as f64).sqrt()) / 2.0;
                return (norm4, b_cur, eps.ln());
            }
        }
    }

    fn fundamental(range: std::ops::Range<i128>) -> Vec<i128> {
        range.filter(|&d| d != 1 && is_fundamental_discriminant(d)).collect()
    }

    #[test]
    fn class_group_examples() {
        let c = cg(-15);
        assert_eq!((c.h, c.elementary_divisors.clone(), c.two_rank), (2, vec![2], 1));
        assert_eq!(FormGroup::imaginary(-15).reps, vec![Form::new(1, 1, 4), Form::new(2, 1, 2)]);
        assert_eq!(cg(-4).h, 1);
        assert_eq!(FormGroup::imaginary(-4).reps, vec![Form::new(1, 0, 1)]);
        assert_eq!(cg(40).h, 2);
        assert!(matches!(class_group(-16, &Budgets::default()), Err(Error::Domain(_))));
        assert!(matches!(class_group(-1_000_003, &Budgets::default()), Err(Error::Range(_))));
    }

    #[test]
    fn known_structures() {
        // Classical values.
        assert_eq!(cg(-23).h, 3);
        assert_eq!(cg(-47).h, 5);
        assert_eq!(cg(-84).elementary_divisors, vec![2, 2]);
        assert_eq!(cg(-56).elementary_divisors, vec![4]);
        assert_eq!(cg(-163).h, 1);
        assert_eq!(cg(-420).elementary_divisors, vec![2, 2, 2]);
        assert_eq!(cg(-5460).elementary_divisors, vec![2, 2, 2, 2]);
        assert_eq!(cg(-3299).elementary_divisors, vec![3, 9]);
        assert_eq!(cg(-4027).elementary_divisors, vec![3, 3]);
        assert_eq!(cg(229).h, 3);
        assert_eq!(cg(12).h, 1);
        assert_eq!(cg(12).narrow_class_number, Some(2));
        assert_eq!(cg(5).fundamental_unit_norm, Some(-1));
        assert_eq!(cg(136).h, 2);
    }

    #[test]
    fn class_number_matches_analytic_formula() {
        for d in fundamental(-2000..0).into_iter().chain(fundamental(2..500)) {
            assert_eq!(cg(d).h, analytic_h(d), "disc {d}");
        }
    }

    #[test]
    fn unit_norm_matches_convergents() {
        for d in fundamental(2..500) {
            let (norm, _, _) = unit_by_convergents(d);
            assert_eq!(fundamental_unit_norm(d).unwrap() as i128, norm, "disc {d}");
        }
    }

    #[test]
    fn genus_theory_two_rank() {
        for d in fundamental(-2000..0) {
            let t = prime_divisor_count(d).unwrap();
            assert_eq!(cg(d).two_rank, t - 1, "disc {d}");
        }
        for d in fundamental(2..2000) {
            let t = prime_divisor_count(d).unwrap();
            let r = cg(d).two_rank;
            assert!(r + 1 == t || r + 2 == t, "disc {d}: two_rank {r}, t {t}");
        }
    }

    #[test]
    fn composition_is_a_group_law() {
        for d in [-5460i128, -3299, -84, 229, 1365, 4 * 1155] {
            let g = if d < 0 { FormGroup::imaginary(d) } else { FormGroup::real_narrow(d) };
            let n = g.order();
            let id = g.identity().unwrap();
            for x in 0..n {
                assert_eq!(g.mul(x, id).unwrap(), x);
                for y in (0..n).step_by(3) {
                    assert_eq!(g.mul(x, y).unwrap(), g.mul(y, x).unwrap());
                    for z in (0..n).step_by(5) {
                        let l = g.mul(g.mul(x, y).unwrap(), z).unwrap();
                        let r = g.mul(x, g.mul(y, z).unwrap()).unwrap();
                        assert_eq!(l, r);
                    }
                }
                assert_eq!(g.pow(x, n as u64).unwrap(), id);
            }
        }
    }

    #[test]
    fn s_class_examples() {
        let s = s_class_group(-15, 3, 5, &Budgets::default()).unwrap();
        assert_eq!(s.base.two_rank, 1);
        assert_eq!(s.s_two_rank, 0);
        // h = 1
        let s = s_class_group(-4, 3, 5, &Budgets::default()).unwrap();
        assert_eq!(s.s_two_rank, 0);
        // -23: 2 splits, 3 splits, 5 inert; h = 3 is odd
        let s = s_class_group(-23, 3, 5, &Budgets::default()).unwrap();
        assert_eq!(s.s_two_rank, s.base.two_rank);
    }

    #[test]
    fn rank_bound_examples() {
        let e = CurveSpec::validate(1, 3, 5, 1).unwrap();
        let d73 = FactoredInteger::from_i128(73).unwrap();
        let r = rank_bound(&e, &d73, &Budgets::default()).unwrap();
        assert_eq!(r.s_class.base.h, 1);
        assert_eq!(r.headline, 14);
        // 2 splits (73 = 1 mod 8), 3 splits, 5 inert; two infinite places
        assert_eq!(r.s_class.s_set_size, 2 + 2 + 2 + 1);
        assert_eq!(r.sharp, 12);
        assert!(rank_bound(&e, &FactoredInteger::from_i128(1).unwrap(), &Budgets::default()).is_err());
    }

    #[test]
    fn sharp_never_exceeds_headline() {
        let b = Budgets::default();
        for (p, q) in crate::arith::twin_pairs_below(60) {
            let e = CurveSpec::validate(1, p, q, 1).unwrap();
            for d in (3i128..300).step_by(2) {
                let Ok(f) = FactoredInteger::from_i128(d) else { continue };
                if !f.is_squarefree() {
                    continue;
                }
                let r = rank_bound(&e, &f, &b).unwrap();
                assert!(r.sharp <= r.headline);
                assert!(r.s_class.s_two_rank <= r.s_class.base.two_rank);
            }
        }
    }
}
