//! Local reduction data.
//!
//! Two independent routes: the closed-form tables for the family (and for the
//! isogenous curve `E'`), and a general Tate algorithm that works on any
//! integral Weierstrass model. Point counts over `F_l` are brute force.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime_u64, legendre, pow_mod, primes_up_to, val};
use crate::curves::{CurveSpec, WeierstrassCoeffs};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionClass {
    GoodOrdinary,
    GoodSupersingular,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

impl ReductionClass {
    pub fn is_good(self) -> bool {
        matches!(self, Self::GoodOrdinary | Self::GoodSupersingular)
    }

    pub fn is_multiplicative(self) -> bool {
        matches!(self, Self::SplitMultiplicative | Self::NonsplitMultiplicative)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kodaira {
    /// `I_m`; `I_0` is good reduction.
    I(u32),
    /// `I_m*`.
    IStar(u32),
    II,
    III,
    IV,
    IVStar,
    IIIStar,
    IIStar,
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I(m) => write!(f, "I{m}"),
            Kodaira::IStar(m) => write!(f, "I{m}*"),
            Kodaira::II => f.write_str("II"),
            Kodaira::III => f.write_str("III"),
            Kodaira::IV => f.write_str("IV"),
            Kodaira::IVStar => f.write_str("IV*"),
            Kodaira::IIIStar => f.write_str("III*"),
            Kodaira::IIStar => f.write_str("II*"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalReductionData {
    pub l: u64,
    pub class: ReductionClass,
    pub kodaira: Kodaira,
    pub tamagawa: u32,
    pub conductor_exponent: u32,
    pub disc_valuation: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCount {
    pub l: u64,
    pub count: u64,
    pub trace: i64,
}

/// A table value together with the rule that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictedCount {
    pub l: u64,
    pub count: u64,
    pub rule: String,
}

fn symbol_at(a: i128, l: u64) -> i8 {
    legendre(a, l)
}

/// Whether the family curve is split at its multiplicative prime `l` (p or q).
pub fn is_split(spec: &CurveSpec, l: u64) -> Option<bool> {
    let d = spec.d_value();
    if l == spec.p {
        Some(symbol_at(2 * spec.eps() * d, l) == 1)
    } else if l == spec.q {
        Some(symbol_at(-2 * spec.eps() * d, l) == 1)
    } else {
        None
    }
}

/// Reduction data of `E_D` at the prime `l` from the closed-form table.
pub fn reduction_data(spec: &CurveSpec, l: u64) -> Result<LocalReductionData> {
    if !is_prime_u64(l) {
        return Err(Error::Domain(format!("{l} is not prime")));
    }
    let data = |class, kodaira, tamagawa, f, ord| LocalReductionData {
        l,
        class,
        kodaira,
        tamagawa,
        conductor_exponent: f,
        disc_valuation: ord,
    };
    if l == 2 {
        return Ok(data(ReductionClass::Additive, Kodaira::III, 2, 5, 6));
    }
    if let Some(split) = is_split(spec, l) {
        let class = if split {
            ReductionClass::SplitMultiplicative
        } else {
            ReductionClass::NonsplitMultiplicative
        };
        return Ok(data(class, Kodaira::I(2), 2, 1, 2));
    }
    if spec.d.primes().any(|x| x == l) {
        return Ok(data(ReductionClass::Additive, Kodaira::IStar(0), 4, 2, 6));
    }
    let class = if is_supersingular(spec, l)? {
        ReductionClass::GoodSupersingular
    } else {
        ReductionClass::GoodOrdinary
    };
    Ok(data(class, Kodaira::I(0), 1, 0, 0))
}

/// `#E_D(F_l)` by an x-loop over `F_l`.
pub fn count_points(spec: &CurveSpec, l: u64, budget: u64) -> Result<PointCount> {
    if !is_prime_u64(l) || spec.is_bad_prime(l) {
        return Err(Error::Domain(format!("{l} is not a good odd prime for this curve")));
    }
    if l > budget {
        return Err(Error::Range(format!("l = {l} exceeds the enumeration budget {budget}")));
    }
    let count = spec.coeffs().count_solutions_mod(l);
    let trace = l as i64 + 1 - count as i64;
    let hasse = 2 * (crate::arith::isqrt(l as u128) as i64) + 1;
    if trace.abs() > hasse {
        return Err(Error::Inconsistent(format!("a_{l} = {trace} violates the Hasse bound")));
    }
    Ok(PointCount { l, count, trace })
}

/// Number of solutions of the reduced equation at any prime, singular points
/// included, plus the point at infinity.
pub fn count_reduced_solutions(spec: &CurveSpec, l: u64) -> u64 {
    spec.coeffs().count_solutions_mod(l)
}

/// Closed-form point count at `l` in `{2, 3, 5, 7, p, q, D_i}`.
pub fn predicted_count(spec: &CurveSpec, l: u64) -> Result<PredictedCount> {
    let out = |count: u64, rule: &str| Ok(PredictedCount { l, count, rule: rule.to_string() });
    let d = spec.d_value();
    let (p, eps) = (spec.p, spec.epsilon);
    if l == 2 {
        return out(3, "l = 2");
    }
    if spec.d.primes().any(|x| x == l) {
        return out(l + 1, "l divides D: cusp y^2 = x^3");
    }
    if l == spec.p {
        let s = symbol_at(2 * spec.eps() * d, l);
        return out(if s == 1 { p } else { p + 2 }, "l = p: p if (2 eps D / p) = 1 else p + 2");
    }
    if l == spec.q {
        let q = spec.q;
        let s = symbol_at(-2 * spec.eps() * d, l);
        return out(if s == 1 { q } else { q + 2 }, "l = q: q if (-2 eps D / q) = 1 else q + 2");
    }
    let dm = |m: i128| d.rem_euclid(m);
    match l {
        3 => out(4, "l = 3 good"),
        5 => {
            let d_square = matches!(dm(5), 1 | 4);
            match p % 5 {
                1 | 2 => out(if d_square { 4 } else { 8 }, "l = 5, p = 1, 2 mod 5"),
                4 => out(if d_square { 8 } else { 4 }, "l = 5, p = 4 mod 5"),
                _ => Err(Error::Inconsistent(format!("p = {p} with 5 dividing neither p nor q"))),
            }
        }
        7 => {
            let r = p % 7;
            if matches!(r, 2 | 3 | 6) {
                return out(8, "l = 7, p = 2, 3, 6 mod 7");
            }
            let d_square = matches!(dm(7), 1 | 2 | 4);
            let first = (eps == 1 && r == 1) || (eps == -1 && r == 4);
            let second = (eps == 1 && r == 4) || (eps == -1 && r == 1);
            if first {
                out(if d_square { 12 } else { 4 }, "l = 7, (eps, p mod 7) = (1, 1) or (-1, 4)")
            } else if second {
                out(if d_square { 4 } else { 12 }, "l = 7, (eps, p mod 7) = (1, 4) or (-1, 1)")
            } else {
                Err(Error::Inconsistent(format!("p = {p} with 7 dividing neither p nor q")))
            }
        }
        _ => Err(Error::Unsupported(format!("no closed-form count at l = {l}"))),
    }
}

/// `C(h, m)` modulo the prime `l` for `h < l`.
fn binomials_mod(h: u64, l: u64) -> Vec<u64> {
    let mut row = Vec::with_capacity(h as usize + 1);
    let mut c = 1u64;
    row.push(c);
    for m in 1..=h {
        let inv = pow_mod(m as u128, (l - 2) as u128, l as u128) as u64;
        c = (c as u128 * ((h - m + 1) % l) as u128 % l as u128 * inv as u128 % l as u128) as u64;
        row.push(c);
    }
    row
}

/// Supersingularity at a good odd prime through the binomial criterion
/// `sum_m C(h, m)^2 p^m q^(h - m) = 0 mod l`, `h = (l - 1) / 2`.
pub fn is_supersingular(spec: &CurveSpec, l: u64) -> Result<bool> {
    if l == 2 || !is_prime_u64(l) || spec.is_bad_prime(l) {
        return Err(Error::Domain(format!("{l} is not a good odd prime for this curve")));
    }
    let h = (l - 1) / 2;
    let c = binomials_mod(h, l);
    let (p, q, lm) = (spec.p as u128 % l as u128, spec.q as u128 % l as u128, l as u128);
    let mut pm = 1u128;
    let mut total = 0u128;
    for m in 0..=h {
        let qm = pow_mod(q, (h - m) as u128, lm);
        let cm = c[m as usize] as u128;
        total = (total + cm * cm % lm * pm % lm * qm) % lm;
        pm = pm * p % lm;
    }
    Ok(total == 0)
}

/// Good primes `l <= bound` dividing `#E_D(F_l)`.
pub fn anomalous_scan(spec: &CurveSpec, bound: u64, budget: u64) -> Result<Vec<u64>> {
    if bound > budget {
        return Err(Error::Range(format!("bound {bound} exceeds the enumeration budget {budget}")));
    }
    let e = spec.coeffs();
    Ok(primes_up_to(bound)
        .into_iter()
        .filter(|&l| !spec.is_bad_prime(l))
        .filter(|&l| e.count_solutions_mod(l).is_multiple_of(l))
        .collect())
}

/// Tamagawa number of `E'` at 2.
pub fn isogenous_c2(epsilon: i8, p: u64) -> u32 {
    match (p % 8, epsilon) {
        (3, _) | (1, 1) | (5, -1) => 2,
        _ => 4,
    }
}

/// Table data of the 2-isogenous curve `E'` at `l` in `{2, p, q}`.
pub fn isogenous_local_data(spec: &CurveSpec, l: u64) -> Result<LocalReductionData> {
    if !spec.is_base() {
        return Err(Error::Unsupported("the isogenous curve is only modelled for D = 1".into()));
    }
    if l == 2 {
        return Ok(LocalReductionData {
            l,
            class: ReductionClass::Additive,
            kodaira: Kodaira::IStar(3),
            tamagawa: isogenous_c2(spec.epsilon, spec.p),
            conductor_exponent: 5,
            disc_valuation: 12,
        });
    }
    match is_split(spec, l) {
        Some(split) => Ok(LocalReductionData {
            l,
            class: if split {
                ReductionClass::SplitMultiplicative
            } else {
                ReductionClass::NonsplitMultiplicative
            },
            kodaira: Kodaira::I(1),
            tamagawa: 1,
            conductor_exponent: 1,
            disc_valuation: 1,
        }),
        None => Err(Error::Domain(format!("E' has good reduction at {l}"))),
    }
}

/// Output of the Tate algorithm: local data plus the local minimal model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TateOutput {
    pub data: LocalReductionData,
    pub minimal_model: WeierstrassCoeffs,
    /// True when the input model was already minimal at `l`.
    pub was_minimal: bool,
}

/// Tate's algorithm at `l` on an integral model.
pub fn tate_oracle(coeffs: &WeierstrassCoeffs, l: u64) -> Result<LocalReductionData> {
    tate(coeffs, l).map(|t| t.data)
}

mod checked {
    use crate::error::{Error, Result};

    pub fn m(a: i128, b: i128) -> Result<i128> {
        a.checked_mul(b).ok_or_else(|| Error::overflow("Tate algorithm"))
    }
    pub fn a(x: i128, y: i128) -> Result<i128> {
        x.checked_add(y).ok_or_else(|| Error::overflow("Tate algorithm"))
    }
    pub fn pw(x: i128, e: u32) -> Result<i128> {
        x.checked_pow(e).ok_or_else(|| Error::overflow("Tate algorithm"))
    }
}

use checked::{a as ca, m as cm, pw};

/// Coordinate change `x = x' + r`, `y = y' + s x' + t` with `u = 1`.
fn rst(c: &WeierstrassCoeffs, r: i128, s: i128, t: i128) -> Result<WeierstrassCoeffs> {
    let WeierstrassCoeffs { a1, a2, a3, a4, a6 } = *c;
    let n1 = ca(a1, cm(2, s)?)?;
    let n2 = ca(ca(a2, -cm(s, a1)?)?, ca(cm(3, r)?, -cm(s, s)?)?)?;
    let n3 = ca(ca(a3, cm(r, a1)?)?, cm(2, t)?)?;
    let n4 = {
        let t1 = ca(a4, -cm(s, a3)?)?;
        let t2 = cm(cm(2, r)?, a2)?;
        let t3 = cm(ca(t, cm(r, s)?)?, a1)?;
        let t4 = cm(cm(3, r)?, r)?;
        let t5 = cm(cm(2, s)?, t)?;
        ca(ca(ca(t1, t2)?, -t3)?, ca(t4, -t5)?)?
    };
    let n6 = {
        let t1 = ca(a6, cm(r, a4)?)?;
        let t2 = cm(cm(r, r)?, a2)?;
        let t3 = pw(r, 3)?;
        let t4 = cm(t, a3)?;
        let t5 = cm(t, t)?;
        let t6 = cm(cm(r, t)?, a1)?;
        ca(ca(ca(t1, t2)?, t3)?, -ca(ca(t4, t5)?, t6)?)?
    };
    Ok(WeierstrassCoeffs::new(n1, n2, n3, n4, n6))
}

/// Valuation with `v(0) = infinity`.
fn v(n: i128, l: u64) -> u32 {
    val(n, l)
}

struct Field {
    l: i128,
}

impl Field {
    fn red(&self, x: i128) -> i128 {
        x.rem_euclid(self.l)
    }
    fn div(&self, x: i128) -> bool {
        x % self.l == 0
    }
    fn inv(&self, x: i128) -> i128 {
        pow_mod(self.red(x) as u128, (self.l - 2) as u128, self.l as u128) as i128
    }
    /// Some `e`-th root of `x` modulo a small prime (only used for l = 2, 3).
    fn root(&self, x: i128, e: u32) -> i128 {
        let x = self.red(x);
        (0..self.l).find(|y| self.red(y.pow(e)) == x).unwrap_or(0)
    }
    fn quad_has_root(&self, a: i128, b: i128, c: i128) -> bool {
        let (a, b, c) = (self.red(a), self.red(b), self.red(c));
        if a == 0 {
            return b != 0 || c == 0;
        }
        if self.l == 2 {
            return (0..2).any(|x| (a * x * x + b * x + c) % 2 == 0);
        }
        legendre(b * b - 4 * a * c, self.l as u64) != -1
    }
    fn cubic_roots(&self, b: i128, c: i128, d: i128) -> u32 {
        let (b, c, d) = (self.red(b), self.red(c), self.red(d));
        (0..self.l)
            .filter(|&x| self.red(((x + b) * x % self.l + c) * x + d) == 0)
            .count() as u32
    }
}

/// Full Tate algorithm, minimalizing by scaling when the model is not minimal.
pub fn tate(coeffs: &WeierstrassCoeffs, l: u64) -> Result<TateOutput> {
    if !is_prime_u64(l) {
        return Err(Error::Domain(format!("{l} is not prime")));
    }
    if l > 1_000_000 {
        return Err(Error::Range(format!("Tate algorithm at {l} exceeds the residue loop limit")));
    }
    let f = Field { l: l as i128 };
    let p = l as i128;
    let half = if l == 2 { 0 } else { f.inv(2) };
    let mut c = *coeffs;
    let mut was_minimal = true;
    let done = |c: WeierstrassCoeffs, was_minimal, class, kodaira, tamagawa, fexp, ord| {
        Ok(TateOutput {
            data: LocalReductionData {
                l,
                class,
                kodaira,
                tamagawa,
                conductor_exponent: fexp,
                disc_valuation: ord,
            },
            minimal_model: c,
            was_minimal,
        })
    };

    loop {
        let delta = c.discriminant()?;
        if delta == 0 {
            return Err(Error::Domain("singular curve".into()));
        }
        let vd = v(delta, l);
        if vd == 0 {
            let count = c.count_solutions_mod(l);
            let trace = l as i128 + 1 - count as i128;
            let class = if trace % p == 0 {
                ReductionClass::GoodSupersingular
            } else {
                ReductionClass::GoodOrdinary
            };
            return done(c, was_minimal, class, Kodaira::I(0), 1, 0, 0);
        }

        // Move the singular point to (0, 0).
        let (b2, b4, b6) = (c.b2()?, c.b4()?, c.b6()?);
        let (r, t) = if l == 2 {
            if f.div(b2) {
                let r = f.root(c.a4, 2);
                let t = f.root(((r + c.a2) * r + c.a4) * r + c.a6, 2);
                (r, t)
            } else {
                let inv = f.inv(c.a1);
                let r = f.red(inv * f.red(c.a3));
                let t = f.red(inv * f.red(c.a4 + r * r));
                (r, t)
            }
        } else if l == 3 {
            let r = if f.div(b2) { f.root(-b6, 3) } else { f.red(-f.inv(b2) * f.red(b4)) };
            (r, f.red(c.a1 * r + c.a3))
        } else {
            let (c4, c6) = (c.c4()?, c.c6()?);
            let r = if f.div(c4) {
                f.red(-f.inv(12) * f.red(b2))
            } else {
                let inv = f.inv(f.red(12 * f.red(c4)));
                f.red(-inv * f.red(f.red(c6) + f.red(b2) * f.red(c4)))
            };
            (r, f.red(-half * f.red(c.a1 * r + c.a3)))
        };
        c = rst(&c, f.red(r), 0, f.red(t))?;
        let (b2, b6, b8) = (c.b2()?, c.b6()?, c.b8()?);

        if !f.div(b2) {
            let split = f.quad_has_root(1, c.a1, -c.a2);
            let (class, tam) = if split {
                (ReductionClass::SplitMultiplicative, vd)
            } else if vd.is_multiple_of(2) {
                (ReductionClass::NonsplitMultiplicative, 2)
            } else {
                (ReductionClass::NonsplitMultiplicative, 1)
            };
            return done(c, was_minimal, class, Kodaira::I(vd), tam, 1, vd);
        }

        let add = ReductionClass::Additive;
        if v(c.a6, l) < 2 {
            return done(c, was_minimal, add, Kodaira::II, 1, vd, vd);
        }
        if v(b8, l) < 3 {
            return done(c, was_minimal, add, Kodaira::III, 2, vd - 1, vd);
        }
        if v(b6, l) < 3 {
            let tam = if f.quad_has_root(1, c.a3 / p, -(c.a6 / (p * p))) { 3 } else { 1 };
            return done(c, was_minimal, add, Kodaira::IV, tam, vd - 2, vd);
        }

        // Make p | a1, a2; p^2 | a3, a4; p^3 | a6.
        let (s, t) = if l == 2 {
            (f.root(c.a2, 2), p * f.root(c.a6 / (p * p), 2))
        } else if l == 3 {
            (c.a1, c.a3)
        } else {
            (f.red(-c.a1 * half), f.red(-c.a3 * half))
        };
        c = rst(&c, 0, s, t)?;

        let b = f.red(c.a2 / p);
        let cc = f.red(c.a4 / (p * p));
        let d = f.red(c.a6 / (p * p * p));
        let w = 27 * d * d - b * b * cc * cc + 4 * b * b * b * d - 18 * b * cc * d + 4 * cc * cc * cc;
        let x = 3 * cc - b * b;

        if !f.div(w) {
            let tam = 1 + f.cubic_roots(b, cc, d);
            return done(c, was_minimal, add, Kodaira::IStar(0), tam, vd - 4, vd);
        }

        if !f.div(x) {
            // Double root: move it to 0 and run the I_m* sub-loop.
            let r = if l == 2 {
                f.root(cc, 2)
            } else if l == 3 {
                f.red(cc * f.inv(b))
            } else {
                f.red(f.red(b * cc - 9 * d) * f.inv(f.red(2 * x)))
            };
            c = rst(&c, p * r, 0, 0)?;
            let (mut ix, mut iy) = (3u32, 3u32);
            let (mut mx, mut my) = (p * p, p * p);
            let tam = loop {
                let a3t = c.a3 / my;
                let a6t = c.a6 / cm(mx, my)?;
                if f.div(ca(cm(a3t, a3t)?, cm(4, a6t)?)?) {
                    let t = if l == 2 {
                        cm(my, f.root(a6t, 2))?
                    } else {
                        cm(my, f.red(-f.red(a3t) * half))?
                    };
                    c = rst(&c, 0, 0, t)?;
                    my = cm(my, p)?;
                    iy += 1;
                    let a2t = c.a2 / p;
                    let a4t = c.a4 / cm(p, mx)?;
                    let a6t = c.a6 / cm(mx, my)?;
                    if f.div(ca(cm(a4t, a4t)?, -cm(cm(4, a6t)?, a2t)?)?) {
                        let r = if l == 2 {
                            cm(mx, f.root(f.red(a6t) * f.inv(a2t), 2))?
                        } else {
                            cm(mx, f.red(-f.red(a4t) * f.inv(f.red(2 * f.red(a2t)))))?
                        };
                        c = rst(&c, r, 0, 0)?;
                        mx = cm(mx, p)?;
                        ix += 1;
                    } else {
                        break if f.quad_has_root(a2t, a4t, a6t) { 4 } else { 2 };
                    }
                } else {
                    break if f.quad_has_root(1, a3t, -a6t) { 4 } else { 2 };
                }
            };
            let m = ix + iy - 5;
            return done(c, was_minimal, add, Kodaira::IStar(m), tam, vd - m - 4, vd);
        }

        // Triple root: move it to 0.
        let r = if l == 2 {
            b
        } else if l == 3 {
            f.root(-d, 3)
        } else {
            f.red(-b * f.inv(3))
        };
        c = rst(&c, p * f.red(r), 0, 0)?;
        let x3t = c.a3 / (p * p);
        let x6t = c.a6 / pw(p, 4)?;
        if !f.div(ca(cm(x3t, x3t)?, cm(4, x6t)?)?) {
            let tam = if f.quad_has_root(1, x3t, -x6t) { 3 } else { 1 };
            return done(c, was_minimal, add, Kodaira::IVStar, tam, vd - 6, vd);
        }
        let t = if l == 2 {
            -p * p * f.root(x6t, 2)
        } else {
            -p * p * f.red(f.red(x3t) * half)
        };
        c = rst(&c, 0, 0, t)?;
        if v(c.a4, l) < 4 {
            return done(c, was_minimal, add, Kodaira::IIIStar, 2, vd - 7, vd);
        }
        if v(c.a6, l) < 6 {
            return done(c, was_minimal, add, Kodaira::IIStar, 1, vd - 8, vd);
        }

        // Not minimal: scale by l.
        was_minimal = false;
        c = WeierstrassCoeffs::new(
            c.a1 / p,
            c.a2 / (p * p),
            c.a3 / pw(p, 3)?,
            c.a4 / pw(p, 4)?,
            c.a6 / pw(p, 6)?,
        );
    }
}
