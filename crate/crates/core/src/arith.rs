//! Exact integer primitives: primality, factorization, quadratic symbols,
//! Hilbert symbols and valuations.
//!
//! Everything works on fixed-width integers. Intermediate products that could
//! leave `i128` go through checked arithmetic and surface as
//! [`Error::Range`](crate::Error::Range).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Miller-Rabin with the first thirteen primes as witnesses is deterministic
/// below this bound.
pub const PRIMALITY_LIMIT: u128 = 3_317_044_064_679_887_385_961_981;

const WITNESSES: [u128; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Window scanned by [`next_twin_prime_pair`] before giving up.
pub const TWIN_SEARCH_WINDOW: u64 = 10_000_000;

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return (a % m) * (b % m) % m;
    }
    // m < 2^82 here, so a + a never overflows.
    let (mut a, mut b) = (a % m, b % m);
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = (acc + a) % m;
        }
        a = (a + a) % m;
        b >>= 1;
    }
    acc
}

/// `base^exp mod m` for `m >= 1`.
pub fn pow_mod(base: u128, mut exp: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let mut base = base % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test for `1 <= n < PRIMALITY_LIMIT`.
pub fn is_prime(n: u128) -> Result<bool> {
    if n == 0 {
        return Err(Error::Domain("primality of 0".into()));
    }
    if n >= PRIMALITY_LIMIT {
        return Err(Error::Range(format!(
            "{n} is above the deterministic primality limit {PRIMALITY_LIMIT}"
        )));
    }
    Ok(is_prime_unchecked(n))
}

pub(crate) fn is_prime_unchecked(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n == w {
            return true;
        }
        if n.is_multiple_of(w) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &w in &WITNESSES {
        let mut x = pow_mod(w, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primality for values already known to be in range.
pub fn is_prime_u64(n: u64) -> bool {
    is_prime_unchecked(n as u128)
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i128
}

/// Floor square root.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

pub fn is_square(n: i128) -> bool {
    n >= 0 && {
        let r = isqrt(n as u128);
        r * r == n as u128
    }
}

/// Sieve of Eratosthenes, primes `<= bound`.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn pollard_brent(n: u128, c: u128) -> Option<u128> {
    let f = |x: u128| (mul_mod(x, x, n) + c) % n;
    let (mut y, m) = (2u128, 128u64);
    let (mut g, mut r, mut q) = (1u128, 1u64, 1u128);
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd(q as i128, n as i128) as u128;
            k += m;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd(x.abs_diff(ys) as i128, n as i128) as u128;
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn split_into(n: u128, out: &mut Vec<u128>) {
    if n == 1 {
        return;
    }
    if is_prime_unchecked(n) {
        out.push(n);
        return;
    }
    let mut c = 1;
    let d = loop {
        if let Some(d) = pollard_brent(n, c) {
            break d;
        }
        c += 1;
    };
    split_into(d, out);
    split_into(n / d, out);
}

/// Prime factorization of `n >= 1` as increasing `(prime, exponent)` pairs.
pub fn factor(n: u128) -> Result<Vec<(u128, u32)>> {
    if n == 0 {
        return Err(Error::Domain("factorization of 0".into()));
    }
    if n >= PRIMALITY_LIMIT {
        return Err(Error::Range(format!("{n} is too large to factor")));
    }
    let mut rest = n;
    let mut primes = Vec::new();
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while rest.is_multiple_of(p) {
            primes.push(p);
            rest /= p;
        }
    }
    split_into(rest, &mut primes);
    primes.sort_unstable();
    let mut out: Vec<(u128, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(out)
}

/// A nonzero integer stored as sign and prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FactoredInteger {
    pub sign: i8,
    pub factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn from_i128(n: i128) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("cannot factor 0".into()));
        }
        let factors = factor(n.unsigned_abs())?
            .into_iter()
            .map(|(p, e)| {
                u64::try_from(p)
                    .map(|p| (p, e))
                    .map_err(|_| Error::Range(format!("prime factor {p} exceeds 64 bits")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FactoredInteger {
            sign: if n < 0 { -1 } else { 1 },
            factors,
        })
    }

    pub fn one() -> Self {
        FactoredInteger {
            sign: 1,
            factors: Vec::new(),
        }
    }

    pub fn value(&self) -> Result<i128> {
        let mut acc: i128 = self.sign as i128;
        for &(p, e) in &self.factors {
            for _ in 0..e {
                acc = acc
                    .checked_mul(p as i128)
                    .ok_or_else(|| Error::overflow("FactoredInteger::value"))?;
            }
        }
        Ok(acc)
    }

    pub fn abs_value(&self) -> Result<i128> {
        self.value().map(i128::abs)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Distinct prime divisors.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn num_primes(&self) -> usize {
        self.factors.len()
    }

    pub fn negated(&self) -> Self {
        FactoredInteger {
            sign: -self.sign,
            factors: self.factors.clone(),
        }
    }
}

/// Smallest twin pair `(p, p + 2)` with `p >= start`.
pub fn next_twin_prime_pair(start: u64) -> Result<(u64, u64)> {
    if start < 3 {
        return Err(Error::Domain(format!("twin search start {start} < 3")));
    }
    let end = start.saturating_add(TWIN_SEARCH_WINDOW);
    let mut p = start | 1;
    while p <= end {
        if (p as u128) + 2 >= PRIMALITY_LIMIT {
            break;
        }
        if is_prime_u64(p) && is_prime_u64(p + 2) {
            return Ok((p, p + 2));
        }
        p += 2;
    }
    Err(Error::Exhaustion(format!(
        "no twin pair in [{start}, {end}]"
    )))
}

/// All twin pairs `(p, p + 2)` with `3 <= p < bound`.
pub fn twin_pairs_below(bound: u64) -> Vec<(u64, u64)> {
    let primes = primes_up_to(bound.saturating_add(2));
    primes
        .windows(2)
        .filter(|w| w[1] == w[0] + 2 && w[0] < bound)
        .map(|w| (w[0], w[1]))
        .collect()
}

/// Jacobi symbol `(a/m)` for odd `m >= 1`.
pub fn jacobi_symbol(a: i128, m: i128) -> Result<i8> {
    if m < 1 || m % 2 == 0 {
        return Err(Error::Domain(format!(
            "Jacobi modulus must be odd and positive, got {m}"
        )));
    }
    Ok(jacobi_unchecked(a, m))
}

pub(crate) fn jacobi_unchecked(a: i128, m: i128) -> i8 {
    let mut a = a.rem_euclid(m);
    let mut m = m;
    let mut t = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(m % 8, 3 | 5) {
                t = -t;
            }
        }
        (a, m) = (m, a);
        if a % 4 == 3 && m % 4 == 3 {
            t = -t;
        }
        a %= m;
    }
    if m == 1 {
        t
    } else {
        0
    }
}

/// Legendre symbol for an odd prime modulus.
pub fn legendre(a: i128, p: u64) -> i8 {
    jacobi_unchecked(a, p as i128)
}

/// True for discriminants of quadratic fields, and for the trivial value 1.
pub fn is_fundamental_discriminant(d: i128) -> bool {
    if d == 0 {
        return false;
    }
    let squarefree = |n: i128| {
        factor(n.unsigned_abs()).is_ok_and(|f| f.iter().all(|&(_, e)| e == 1))
    };
    match d.rem_euclid(4) {
        1 => squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m)
        }
        _ => false,
    }
}

/// Kronecker symbol `(d/n)` for a fundamental discriminant `d`.
///
/// `d = 1` is accepted and gives the trivial character.
pub fn kronecker_character(d: i128, n: i128) -> Result<i8> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::Domain(format!("{d} is not a fundamental discriminant")));
    }
    Ok(kronecker_unchecked(d, n))
}

pub(crate) fn kronecker_unchecked(d: i128, n: i128) -> i8 {
    if n == 0 {
        return if d.abs() == 1 { 1 } else { 0 };
    }
    let mut s = 1i8;
    let mut m = n;
    if m < 0 {
        m = -m;
        if d < 0 {
            s = -s;
        }
    }
    while m % 2 == 0 {
        m /= 2;
        match d.rem_euclid(8) {
            1 | 7 => {}
            3 | 5 => s = -s,
            _ => return 0,
        }
    }
    s * jacobi_unchecked(d, m)
}

/// Largest `e` with `l^e | n`.
pub fn valuation(n: i128, l: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::Domain("valuation of 0".into()));
    }
    if l < 2 {
        return Err(Error::Domain(format!("valuation base {l}")));
    }
    let l = l as i128;
    let mut n = n;
    let mut e = 0;
    while n % l == 0 {
        n /= l;
        e += 1;
    }
    Ok(e)
}

pub(crate) fn val(n: i128, l: u64) -> u32 {
    valuation(n, l).unwrap_or(u32::MAX)
}

/// Hilbert symbol `(a, b)_l` over `Q_l`.
pub fn hilbert_symbol_local(a: i128, b: i128, l: u64) -> Result<i8> {
    if a == 0 || b == 0 {
        return Err(Error::Domain("Hilbert symbol of 0".into()));
    }
    if !is_prime_u64(l) {
        return Err(Error::Domain(format!("{l} is not prime")));
    }
    let (alpha, beta) = (val(a, l), val(b, l));
    let li = l as i128;
    let u = a / li.pow(alpha);
    let v = b / li.pow(beta);
    let parity = if l == 2 {
        let eps = |x: i128| u32::from(x.rem_euclid(4) == 3);
        let omega = |x: i128| u32::from(matches!(x.rem_euclid(8), 3 | 5));
        eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
    } else {
        let mut e = (alpha * beta) as u64 * ((l - 1) / 2);
        if beta % 2 == 1 && legendre(u, l) == -1 {
            e += 1;
        }
        if alpha % 2 == 1 && legendre(v, l) == -1 {
            e += 1;
        }
        (e % 2) as u32
    };
    Ok(if parity % 2 == 0 { 1 } else { -1 })
}

/// Number of positive divisors.
pub fn divisor_count(n: u64) -> Result<u64> {
    Ok(factor(n as u128)?
        .iter()
        .map(|&(_, e)| e as u64 + 1)
        .product())
}
