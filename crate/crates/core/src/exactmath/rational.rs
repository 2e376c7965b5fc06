//! Rationals, integer helpers, p-adic valuations and integer factorization.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

use crate::error::{Error, Result};

/// Exact rational number with positive denominator in lowest terms.
pub type Rational = BigRational;

/// p-adic valuation of a number; `Infinity` is the valuation of zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinity)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: &BigInt) -> Rational {
    Rational::from_integer(n.clone())
}

/// Parses "12", "-7" or "3/4" into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Input(format!("cannot parse rational '{s}'"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Input(format!("zero denominator in '{s}'")));
        }
        Ok(Rational::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rational::from_integer(n))
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Deterministic primality test for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_u64(r, a, m);
        }
        a = mul_mod_u64(a, a, m);
        e >>= 1;
    }
    r
}

/// Probabilistic-free primality for big integers: deterministic below 2^64,
/// strong Miller-Rabin with the first 20 prime bases above.
pub fn is_prime_big(n: &BigInt) -> bool {
    if n.sign() != Sign::Plus {
        return false;
    }
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    let n = n.magnitude().clone();
    let one = BigUint::one();
    let nm1 = &n - &one;
    let mut d = nm1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    let bases = [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];
    'outer: for &a in &bases {
        let a = BigUint::from(a);
        if (&n % &a).is_zero() {
            return false;
        }
        let mut x = a.modpow(&d, &n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % &n;
            if x == nm1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

pub fn check_prime(p: u64) -> Result<()> {
    if is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::Input(format!("{p} is not prime")))
    }
}

/// v_p of a nonzero integer; `None` for zero.
pub fn val_int(n: &BigInt, p: u64) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

pub fn val_rat(q: &Rational, p: u64) -> Valuation {
    if q.is_zero() {
        return Valuation::Infinity;
    }
    let a = val_int(q.numer(), p).unwrap();
    let b = val_int(q.denom(), p).unwrap();
    Valuation::Finite(a - b)
}

/// v_p(q) with a primality check on p.
pub fn valuation_of(q: &Rational, p: u64) -> Result<Valuation> {
    check_prime(p)?;
    Ok(val_rat(q, p))
}

pub fn pow_big(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Nonnegative residue of an integer modulo m.
pub fn mod_u64(n: &BigInt, m: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(m));
    r.to_u64().unwrap()
}

/// Integer square root test: returns sqrt when n is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Exact rational square root when it exists.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let n = exact_sqrt(q.numer())?;
    let d = exact_sqrt(q.denom())?;
    Some(Rational::new(n, d))
}

/// Integer cube root test.
pub fn exact_cbrt(n: &BigInt) -> Option<BigInt> {
    let r = n.cbrt();
    for c in [&r - 1, r.clone(), &r + 1] {
        if &c * &c * &c == *n {
            return Some(c);
        }
    }
    None
}

fn pollard_brent(n: &BigInt, seed: u64) -> Option<BigInt> {
    let one = BigInt::one();
    let c = BigInt::from(seed);
    let f = |x: &BigInt| (x * x + &c) % n;
    let mut y = BigInt::from(2 + seed);
    let m = 128usize;
    let mut g = one.clone();
    let mut r = 1usize;
    let mut q = one.clone();
    let mut x = y.clone();
    let mut ys = y.clone();
    while g == one {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g == one {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                q = (&q * (&x - &y).abs()) % n;
            }
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
        if r > 1 << 22 {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = (&x - &ys).abs().gcd(n);
            if g > one {
                break;
            }
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}

fn factor_rec(n: BigInt, out: &mut Vec<BigInt>) {
    if n.is_one() {
        return;
    }
    if is_prime_big(&n) {
        out.push(n);
        return;
    }
    for seed in 1..200u64 {
        if let Some(d) = pollard_brent(&n, seed) {
            let e = &n / &d;
            factor_rec(d, out);
            factor_rec(e, out);
            return;
        }
    }
    // Unfactored composite kept as-is; callers treat it as a single factor.
    out.push(n);
}

/// Factorization of |n| into primes with exponents, ascending.
pub fn factor_integer(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut m = n.abs();
    let mut primes = Vec::new();
    if m.is_zero() {
        return vec![];
    }
    let mut d = 2u64;
    while d < 20000 {
        let db = BigInt::from(d);
        if &db * &db > m {
            break;
        }
        while (&m % &db).is_zero() {
            m /= &db;
            primes.push(db.clone());
        }
        d += if d == 2 { 1 } else { 2 };
    }
    factor_rec(m, &mut primes);
    primes.sort();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((r, e)) if *r == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    out
}

pub fn rat_to_f64(q: &Rational) -> f64 {
    let n = q.numer();
    let d = q.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift = nb - db - 60;
    // Scale so that the integer quotient carries about 60 significant bits.
    let (num, den) = if shift > 0 {
        (n.clone(), d << (shift as usize))
    } else {
        (n << ((-shift) as usize), d.clone())
    };
    let qt = num / den;
    let f = qt.to_f64().unwrap_or(f64::NAN);
    f * 2f64.powi(shift as i32)
}

/// Natural logarithm of a positive big integer.
pub fn ln_big(n: &BigInt) -> f64 {
    assert!(n.is_positive());
    let bits = n.bits() as i64;
    if bits < 1000 {
        if let Some(f) = n.to_f64() {
            if f.is_finite() {
                return f.ln();
            }
        }
    }
    let shift = bits - 64;
    let top = (n >> shift as usize).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact conversion of a finite double to a rational.
pub fn f64_to_rat(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

pub fn big_gcd_all<'a, I: IntoIterator<Item = &'a BigInt>>(it: I) -> BigInt {
    let mut g = BigInt::zero();
    for x in it {
        g = g.gcd(x);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(valuation_of(&rat(12, 1), 2).unwrap(), Valuation::Finite(2));
        assert_eq!(valuation_of(&rat(0, 1), 5).unwrap(), Valuation::Infinity);
        assert_eq!(valuation_of(&rat(7823, 4), 2).unwrap(), Valuation::Finite(-2));
        assert!(valuation_of(&rat(3, 1), 4).is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational(" 42 ").unwrap(), rat(42, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn factoring() {
        let n = BigInt::from(2u64.pow(5) * 3 * 7823) * BigInt::from(1_000_000_007u64) * BigInt::from(998_244_353u64);
        let f = factor_integer(&n);
        let ps: Vec<String> = f.iter().map(|(p, e)| format!("{p}^{e}")).collect();
        assert_eq!(ps, vec!["2^5", "3^1", "7823^1", "998244353^1", "1000000007^1"]);
    }

    #[test]
    fn float_conversion() {
        let q = rat(1, 3);
        assert!((rat_to_f64(&q) - 1.0 / 3.0).abs() < 1e-16);
        let big = Rational::from_integer(BigInt::from(10).pow(40u32));
        assert!((rat_to_f64(&big) / 1e40 - 1.0).abs() < 1e-15);
        assert!((ln_big(&BigInt::from(10).pow(400u32)) - 400.0 * 10f64.ln()).abs() < 1e-9);
    }
}
