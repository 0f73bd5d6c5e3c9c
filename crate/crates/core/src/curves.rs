//! The curve family, its global invariants, the sign-flip twist identity, the
//! 2-isogenous curve and the rational torsion subgroup.

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_prime, is_square, primes_up_to, FactoredInteger};
use crate::error::{Error, Result};

/// `E^eps_D : y^2 = x (x + eps p D) (x + eps q D)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveSpec {
    pub epsilon: i8,
    pub p: u64,
    pub q: u64,
    pub d: FactoredInteger,
}

/// Long Weierstrass coefficients `[a1, a2, a3, a4, a6]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeierstrassCoeffs {
    pub a1: i128,
    pub a2: i128,
    pub a3: i128,
    pub a4: i128,
    pub a6: i128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveInvariants {
    pub discriminant: i128,
    pub j_numerator: i128,
    pub j_denominator: i128,
    pub conductor: i128,
}

/// Rational torsion together with the evidence gathered for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionGroup {
    /// Invariant factors, `[2, 2]` for the Klein four-group.
    pub structure: Vec<u64>,
    pub two_torsion_points: Vec<(i128, i128)>,
    /// `(l, #E(F_l))` at the good primes that were counted.
    pub counts: Vec<(u64, u64)>,
    pub gcd_of_counts: u64,
    /// Every integer `x` with `|x|` up to this bound was checked for a point
    /// whose double is 2-torsion.
    pub order4_search_bound: i128,
}

fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or_else(|| Error::overflow("curve arithmetic"))
}

fn add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or_else(|| Error::overflow("curve arithmetic"))
}

fn sub(a: i128, b: i128) -> Result<i128> {
    a.checked_sub(b).ok_or_else(|| Error::overflow("curve arithmetic"))
}

impl WeierstrassCoeffs {
    pub fn new(a1: i128, a2: i128, a3: i128, a4: i128, a6: i128) -> Self {
        WeierstrassCoeffs { a1, a2, a3, a4, a6 }
    }

    pub fn b2(&self) -> Result<i128> {
        add(mul(self.a1, self.a1)?, mul(4, self.a2)?)
    }

    pub fn b4(&self) -> Result<i128> {
        add(mul(self.a1, self.a3)?, mul(2, self.a4)?)
    }

    pub fn b6(&self) -> Result<i128> {
        add(mul(self.a3, self.a3)?, mul(4, self.a6)?)
    }

    pub fn b8(&self) -> Result<i128> {
        let WeierstrassCoeffs { a1, a2, a3, a4, a6 } = *self;
        let t1 = mul(mul(a1, a1)?, a6)?;
        let t2 = mul(mul(4, a2)?, a6)?;
        let t3 = mul(mul(a1, a3)?, a4)?;
        let t4 = mul(mul(a2, a3)?, a3)?;
        let t5 = mul(a4, a4)?;
        sub(add(sub(t1, t3)?, add(t2, t4)?)?, t5)
    }

    pub fn c4(&self) -> Result<i128> {
        let b2 = self.b2()?;
        sub(mul(b2, b2)?, mul(24, self.b4()?)?)
    }

    pub fn c6(&self) -> Result<i128> {
        let (b2, b4, b6) = (self.b2()?, self.b4()?, self.b6()?);
        let t = mul(mul(b2, b2)?, b2)?;
        add(sub(mul(36, mul(b2, b4)?)?, t)?, mul(-216, b6)?)
    }

    /// `-b2^2 b8 - 8 b4^3 - 27 b6^2 + 9 b2 b4 b6`.
    pub fn discriminant(&self) -> Result<i128> {
        let (b2, b4, b6, b8) = (self.b2()?, self.b4()?, self.b6()?, self.b8()?);
        let t1 = mul(mul(-b2, b2)?, b8)?;
        let t2 = mul(mul(mul(8, b4)?, b4)?, b4)?;
        let t3 = mul(mul(27, b6)?, b6)?;
        let t4 = mul(mul(mul(9, b2)?, b4)?, b6)?;
        add(sub(sub(t1, t2)?, t3)?, t4)
    }

    /// `(c4^3 - c6^2) / 1728`, an independent route to the discriminant.
    pub fn discriminant_via_c4_c6(&self) -> Result<i128> {
        let (c4, c6) = (self.c4()?, self.c6()?);
        let diff = sub(mul(mul(c4, c4)?, c4)?, mul(c6, c6)?)?;
        if diff % 1728 != 0 {
            return Err(Error::Inconsistent("c4^3 - c6^2 not divisible by 1728".into()));
        }
        Ok(diff / 1728)
    }

    /// Number of solutions of the reduced equation over `F_l`, plus the point
    /// at infinity. At bad primes the singular point is included.
    pub fn count_solutions_mod(&self, l: u64) -> u64 {
        let li = l as i128;
        let r = |v: i128| v.rem_euclid(li);
        let (a1, a2, a3, a4, a6) = (r(self.a1), r(self.a2), r(self.a3), r(self.a4), r(self.a6));
        if l <= 3 {
            let mut n = 1;
            for x in 0..li {
                for y in 0..li {
                    let lhs = y * y + a1 * x * y + a3 * y;
                    let rhs = x * x * x + a2 * x * x + a4 * x + a6;
                    if (lhs - rhs).rem_euclid(li) == 0 {
                        n += 1;
                    }
                }
            }
            return n;
        }
        // (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
        let b2 = r(a1 * a1 + 4 * a2);
        let b4 = r(a1 * a3 + 2 * a4);
        let b6 = r(a3 * a3 + 4 * a6);
        let chi = residue_table(l);
        let mut n: i64 = 1 + l as i64;
        for x in 0..li {
            let g = r(((4 * x + b2) * x % li + 2 * b4) * x + b6);
            n += chi[g as usize] as i64;
        }
        n as u64
    }
}

/// `chi[a]` is the Legendre symbol of `a` modulo the odd prime `l`.
pub fn residue_table(l: u64) -> Vec<i8> {
    let n = l as usize;
    let mut chi = vec![-1i8; n];
    chi[0] = 0;
    for x in 1..=n / 2 {
        chi[x * x % n] = 1;
    }
    chi
}

impl CurveSpec {
    /// Checks every family constraint and factors `D`.
    pub fn validate(epsilon: i64, p: u64, q: u64, d_raw: i128) -> Result<Self> {
        if epsilon != 1 && epsilon != -1 {
            return Err(Error::Domain(format!("epsilon must be 1 or -1, got {epsilon}")));
        }
        if p.checked_add(2) != Some(q) {
            return Err(Error::Twin { p: p as i128, q: q as i128 });
        }
        for n in [p, q] {
            if !is_prime(n as u128)? {
                return Err(Error::Primality(n as i128));
            }
        }
        if d_raw == 0 {
            return Err(Error::Twist("D = 0".into()));
        }
        let d = FactoredInteger::from_i128(d_raw)?;
        if !d.is_squarefree() {
            return Err(Error::Twist(format!("D = {d_raw} is not square-free")));
        }
        let pq = (p as i128) * (q as i128);
        if gcd(d_raw, 2 * pq) != 1 {
            return Err(Error::Twist(format!("D = {d_raw} is not coprime to 2pq = {}", 2 * pq)));
        }
        let spec = CurveSpec { epsilon: epsilon as i8, p, q, d };
        spec.invariants()?;
        Ok(spec)
    }

    /// The value of `D`; always fits because it was validated from an `i128`.
    pub fn d_value(&self) -> i128 {
        self.d.value().expect("validated D fits in i128")
    }

    pub fn eps(&self) -> i128 {
        self.epsilon as i128
    }

    pub fn is_base(&self) -> bool {
        self.d.factors.is_empty() && self.d.sign == 1
    }

    /// Same `(epsilon, p, q)` with `D = 1`.
    pub fn base(&self) -> CurveSpec {
        CurveSpec { d: FactoredInteger::one(), ..self.clone() }
    }

    pub fn coeffs(&self) -> WeierstrassCoeffs {
        let (p, q, d) = (self.p as i128, self.q as i128, self.d_value());
        WeierstrassCoeffs::new(0, self.eps() * (p + q) * d, 0, p * q * d * d, 0)
    }

    /// `2, p, q` and the primes of `D`, increasing.
    pub fn bad_primes(&self) -> Vec<u64> {
        let mut v: Vec<u64> = [2, self.p, self.q].into_iter().chain(self.d.primes()).collect();
        v.sort_unstable();
        v
    }

    pub fn is_bad_prime(&self, l: u64) -> bool {
        l == 2 || l == self.p || l == self.q || self.d.primes().any(|x| x == l)
    }

    pub fn invariants(&self) -> Result<CurveInvariants> {
        let (p, q) = (self.p as i128, self.q as i128);
        let d2 = mul(self.d_value(), self.d_value())?;
        let d6 = mul(mul(d2, d2)?, d2)?;
        let pq = mul(p, q)?;
        let discriminant = mul(mul(64, mul(pq, pq)?)?, d6)?;
        let conductor = mul(mul(32, pq)?, d2)?;
        let base = add(mul(p, p)?, 2 * q)?;
        let num = mul(64, mul(mul(base, base)?, base)?)?;
        let den = mul(pq, pq)?;
        let g = gcd(num, den);
        Ok(CurveInvariants {
            discriminant,
            j_numerator: num / g,
            j_denominator: den / g,
            conductor,
        })
    }

    /// `E^eps_{-D} = E^{-eps}_D`: the twist by `-1` stays in the family.
    pub fn minus_twist(&self) -> CurveSpec {
        CurveSpec { epsilon: -self.epsilon, ..self.clone() }
    }

    /// `E' : y^2 = x^3 - 2 eps (p + q) x^2 + 4x`.
    pub fn isogenous_curve(&self) -> Result<WeierstrassCoeffs> {
        if !self.is_base() {
            return Err(Error::Unsupported("the isogenous curve is only modelled for D = 1".into()));
        }
        let s = (self.p + self.q) as i128;
        Ok(WeierstrassCoeffs::new(0, -2 * self.eps() * s, 0, 4, 0))
    }

    pub fn two_torsion_points(&self) -> Vec<(i128, i128)> {
        let (p, q, d) = (self.p as i128, self.q as i128, self.d_value());
        vec![(0, 0), (-self.eps() * p * d, 0), (-self.eps() * q * d, 0)]
    }

    /// The rational torsion subgroup, verified rather than assumed.
    pub fn torsion_group(&self) -> Result<TorsionGroup> {
        let e = self.coeffs();
        let f = |x: i128| -> Result<i128> { add(mul(add(mul(add(x, e.a2)?, x)?, e.a4)?, x)?, e.a6) };
        let points = self.two_torsion_points();
        for &(x, y) in &points {
            if f(x)? != y * y {
                return Err(Error::Inconsistent(format!("({x}, {y}) is not on the curve")));
            }
        }

        let good: Vec<u64> = primes_up_to(10_000)
            .into_iter()
            .filter(|&l| !self.is_bad_prime(l))
            .take(8)
            .collect();
        let counts: Vec<(u64, u64)> = good.iter().map(|&l| (l, e.count_solutions_mod(l))).collect();
        if counts.len() < 5 {
            return Err(Error::Exhaustion("fewer than five good primes found".into()));
        }
        if let Some(&(l, n)) = counts.iter().find(|(_, n)| n % 4 != 0) {
            return Err(Error::Inconsistent(format!("#E(F_{l}) = {n} is not divisible by 4")));
        }
        let g = counts.iter().fold(0u64, |g, &(_, n)| gcd(g as i128, n as i128) as u64);
        let odd = g >> g.trailing_zeros();
        if odd != 1 {
            return Err(Error::Inconsistent(format!("point counts share the odd factor {odd}")));
        }

        // A point P with 2P = (r, 0) satisfies f'(x)^2 = 4 f(x) (r + a2 + 2x).
        let bound = mul(mul(4, mul(self.p as i128, self.q as i128)?)?, self.d_value().abs())?;
        for x in -bound..=bound {
            let fx = f(x)?;
            if fx <= 0 || !is_square(fx) {
                continue;
            }
            let fp = add(mul(add(mul(3, x)?, mul(2, e.a2)?)?, x)?, e.a4)?;
            let lhs = mul(fp, fp)?;
            for &(r, _) in &points {
                if lhs == mul(mul(4, fx)?, add(add(r, e.a2)?, 2 * x)?)? {
                    return Err(Error::Inconsistent(format!("x = {x} gives a point of order 4")));
                }
            }
        }

        Ok(TorsionGroup {
            structure: vec![2, 2],
            two_torsion_points: points,
            counts,
            gcd_of_counts: g,
            order4_search_bound: bound,
        })
    }
}
