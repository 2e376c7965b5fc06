//! Sparse multivariate polynomials in at most four variables over Z or Q.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::rational::{rat_int, val_int, Rational};
use crate::error::{Error, Result};

/// Exponent vector; unused trailing slots stay zero.
pub type Mono = [u8; 4];

pub trait Coeff:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl Coeff for BigInt {}
impl Coeff for Rational {}
impl Coeff for i64 {}
impl Coeff for f64 {}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MPoly<C> {
    nvars: usize,
    terms: BTreeMap<Mono, C>,
}

pub type QPoly = MPoly<Rational>;
pub type ZPoly = MPoly<BigInt>;

pub fn mono_deg(m: &Mono) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

pub fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

/// All exponent vectors of total degree `d` in `n` variables, lexicographically descending.
pub fn monomials(n: usize, d: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    let mut cur = [0u8; 4];
    fn rec(i: usize, n: usize, left: u32, cur: &mut Mono, out: &mut Vec<Mono>) {
        if i == n - 1 {
            cur[i] = left as u8;
            out.push(*cur);
            cur[i] = 0;
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e as u8;
            rec(i + 1, n, left - e, cur, out);
        }
        cur[i] = 0;
    }
    if n == 0 {
        return out;
    }
    rec(0, n, d, &mut cur, &mut out);
    out
}

impl<C: Coeff> MPoly<C> {
    pub fn zero(nvars: usize) -> Self {
        assert!((1..=4).contains(&nvars), "variable count must be 1..=4");
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term([0; 4], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = [0u8; 4];
        m[i] = 1;
        Self::monomial(nvars, m, C::one())
    }

    pub fn monomial(nvars: usize, m: Mono, c: C) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono, C)>>(nvars: usize, it: I) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Mono) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, m: Mono, c: C) {
        debug_assert!(m[self.nvars..].iter().all(|&e| e == 0));
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(mono_deg).max()
    }

    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|m| m[i] as u32).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(mono_deg);
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (*m, v.clone() * c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one(self.nvars);
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    pub fn eval(&self, pt: &[C]) -> C {
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..self.nvars {
                for _ in 0..m[i] {
                    t = t * pt[i].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Composition: substitutes `subs[i]` for variable i. All substitutes share a variable count.
    pub fn subst(&self, subs: &[MPoly<C>]) -> MPoly<C> {
        assert_eq!(subs.len(), self.nvars);
        let nv = subs[0].nvars;
        let mut cache: Vec<Vec<MPoly<C>>> = subs.iter().map(|s| vec![MPoly::one(nv), s.clone()]).collect();
        let mut out = MPoly::zero(nv);
        for (m, c) in &self.terms {
            let mut t = MPoly::constant(nv, c.clone());
            for i in 0..self.nvars {
                let e = m[i] as usize;
                while cache[i].len() <= e {
                    let next = &cache[i][cache[i].len() - 1] * &subs[i];
                    cache[i].push(next);
                }
                if e > 0 {
                    t = &t * &cache[i][e];
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Linear change of variables x_i <- sum_j mat[i][j] y_j.
    pub fn linear_subst(&self, mat: &[Vec<C>]) -> MPoly<C> {
        let n = mat[0].len();
        let subs: Vec<MPoly<C>> = mat
            .iter()
            .map(|row| {
                MPoly::from_terms(
                    n,
                    row.iter().enumerate().map(|(j, c)| {
                        let mut m = [0u8; 4];
                        m[j] = 1;
                        (m, c.clone())
                    }),
                )
            })
            .collect();
        self.subst(&subs)
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            if m[i] > 0 {
                let mut mm = *m;
                let mut k = C::zero();
                for _ in 0..m[i] {
                    k = k + C::one();
                }
                mm[i] -= 1;
                out.add_term(mm, c.clone() * k);
            }
        }
        out
    }

    /// Coefficients with respect to variable i, lowest power first; each coefficient keeps all variables (with x_i absent).
    pub fn coeffs_in(&self, i: usize) -> Vec<MPoly<C>> {
        let d = self.degree_in(i).unwrap_or(0) as usize;
        let mut out = vec![Self::zero(self.nvars); d + 1];
        for (m, c) in &self.terms {
            let mut mm = *m;
            let e = mm[i] as usize;
            mm[i] = 0;
            out[e].add_term(mm, c.clone());
        }
        out
    }

    pub fn map_coeffs<D: Coeff, F: Fn(&C) -> D>(&self, f: F) -> MPoly<D> {
        MPoly::from_terms(self.nvars, self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    /// Reinterprets the polynomial in a different number of variables (dropping or adding unused ones).
    pub fn with_nvars(&self, n: usize) -> Self {
        for m in self.terms.keys() {
            assert!(m[n..].iter().all(|&e| e == 0));
        }
        MPoly { nvars: n, terms: self.terms.clone() }
    }

    /// Permutes variables: variable i becomes variable perm[i].
    pub fn permute(&self, perm: &[usize]) -> Self {
        MPoly::from_terms(
            self.nvars,
            self.terms.iter().map(|(m, c)| {
                let mut mm = [0u8; 4];
                for i in 0..self.nvars {
                    mm[perm[i]] = m[i];
                }
                (mm, c.clone())
            }),
        )
    }

    pub fn leading(&self) -> Option<(&Mono, &C)> {
        self.terms.iter().next_back()
    }
}

impl<'a, C: Coeff> Add for &'a MPoly<C> {
    type Output = MPoly<C>;
    fn add(self, o: &MPoly<C>) -> MPoly<C> {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, c.clone());
        }
        r
    }
}

impl<'a, C: Coeff> Sub for &'a MPoly<C> {
    type Output = MPoly<C>;
    fn sub(self, o: &MPoly<C>) -> MPoly<C> {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, -c.clone());
        }
        r
    }
}

impl<'a, C: Coeff> Mul for &'a MPoly<C> {
    type Output = MPoly<C>;
    fn mul(self, o: &MPoly<C>) -> MPoly<C> {
        let nv = self.nvars.max(o.nvars);
        let mut r = MPoly::zero(nv);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(mono_mul(m1, m2), c1.clone() * c2.clone());
            }
        }
        r
    }
}

impl<'a, C: Coeff> Neg for &'a MPoly<C> {
    type Output = MPoly<C>;
    fn neg(self) -> MPoly<C> {
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl<C: Coeff> $tr for MPoly<C> {
            type Output = MPoly<C>;
            fn $f(self, o: MPoly<C>) -> MPoly<C> {
                (&self).$f(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl<C: Coeff> Neg for MPoly<C> {
    type Output = MPoly<C>;
    fn neg(self) -> MPoly<C> {
        -&self
    }
}

const VAR_NAMES: [&str; 4] = ["x1", "x2", "x3", "x4"];

impl<C: Coeff + fmt::Display> fmt::Display for MPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut parts = vec![];
            let cs = format!("{c}");
            let is_const = mono_deg(m) == 0;
            if is_const || cs != "1" {
                parts.push(if cs.contains(['+', '-', '/']) && !is_const { format!("({cs})") } else { cs });
            }
            for i in 0..self.nvars {
                match m[i] {
                    0 => {}
                    1 => parts.push(VAR_NAMES[i].to_string()),
                    e => parts.push(format!("{}^{}", VAR_NAMES[i], e)),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl<C: Coeff + fmt::Display> fmt::Debug for MPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly[{}]({})", self.nvars, self)
    }
}

impl MPoly<Rational> {
    pub fn from_int(p: &ZPoly) -> QPoly {
        p.map_coeffs(rat_int)
    }

    /// Integer-coefficient version when every coefficient is integral.
    pub fn to_integer(&self) -> Option<ZPoly> {
        if self.terms.values().all(|c| c.is_integer()) {
            Some(self.map_coeffs(|c| c.to_integer()))
        } else {
            None
        }
    }

    pub fn div_scalar(&self, c: &Rational) -> QPoly {
        self.scale(&(Rational::one() / c))
    }

    /// Exact division by a nonzero divisor; errors if the division leaves a remainder.
    pub fn div_exact(&self, d: &QPoly) -> Result<QPoly> {
        let (lm, lc) = d.leading().ok_or_else(|| Error::Input("division by zero polynomial".into()))?;
        let (lm, lc) = (*lm, lc.clone());
        let mut rem = self.clone();
        let mut q = QPoly::zero(self.nvars.max(d.nvars));
        while let Some((m, c)) = rem.leading().map(|(m, c)| (*m, c.clone())) {
            if (0..4).any(|i| m[i] < lm[i]) {
                return Err(Error::Input("inexact polynomial division".into()));
            }
            let mm = [m[0] - lm[0], m[1] - lm[1], m[2] - lm[2], m[3] - lm[3]];
            let t = QPoly::monomial(q.nvars, mm, c / lc.clone());
            rem = &rem - &(&t * d);
            q = &q + &t;
        }
        Ok(q)
    }
}

impl MPoly<BigInt> {
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
        }
        g
    }

    /// Minimum p-adic valuation of the coefficients (the valuation of the polynomial).
    pub fn min_valuation(&self, p: u64) -> Option<i64> {
        self.terms.values().filter_map(|c| val_int(c, p)).min()
    }

    /// Exact division of every coefficient by an integer; panics if inexact.
    pub fn div_int_exact(&self, d: &BigInt) -> ZPoly {
        self.map_coeffs(|c| {
            let (q, r) = c.div_rem(d);
            assert!(r.is_zero(), "inexact coefficient division");
            q
        })
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(BigInt::zero)
    }
}

/// Minimum valuation of a nonzero polynomial over Q.
pub fn min_valuation_of_poly(f: &QPoly, p: u64) -> Result<i64> {
    super::rational::check_prime(p)?;
    if f.is_zero() {
        return Err(Error::Input("zero polynomial has no valuation".into()));
    }
    Ok(f
        .terms()
        .map(|(_, c)| super::rational::val_rat(c, p).finite().unwrap())
        .min()
        .unwrap())
}

/// Resultant with respect to variable `var`, via the fraction-free Sylvester determinant.
pub fn resultant(f: &QPoly, g: &QPoly, var: usize) -> Result<QPoly> {
    let df = f.degree_in(var).unwrap_or(0) as usize;
    let dg = g.degree_in(var).unwrap_or(0) as usize;
    if f.is_zero() || g.is_zero() {
        return Err(Error::Input("resultant of a zero polynomial".into()));
    }
    if df == 0 && dg == 0 {
        return Err(Error::Input("both polynomials are constant in the eliminated variable".into()));
    }
    let nv = f.nvars().max(g.nvars());
    let fc = f.with_nvars(nv).coeffs_in(var);
    let gc = g.with_nvars(nv).coeffs_in(var);
    let n = df + dg;
    if n == 0 {
        return Ok(QPoly::one(nv));
    }
    let mut m = vec![vec![QPoly::zero(nv); n]; n];
    for r in 0..dg {
        for (k, c) in fc.iter().enumerate() {
            m[r][r + df - k] = c.clone();
        }
    }
    for r in 0..df {
        for (k, c) in gc.iter().enumerate() {
            m[dg + r][r + dg - k] = c.clone();
        }
    }
    det_bareiss(m)
}

/// Determinant of a square matrix of polynomials by Bareiss elimination with exact division.
pub fn det_bareiss(mut m: Vec<Vec<QPoly>>) -> Result<QPoly> {
    let n = m.len();
    let nv = m[0][0].nvars();
    let mut sign = false;
    let mut prev = QPoly::one(nv);
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
                None => return Ok(QPoly::zero(nv)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = t.div_exact(&prev)?;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    Ok(if sign { -d } else { d })
}

/// Determinant of a small matrix of polynomials by cofactor expansion.
pub fn det_cofactor<C: Coeff>(m: &[Vec<MPoly<C>>]) -> MPoly<C> {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    if n == 2 {
        return &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
    }
    let nv = m[0][0].nvars();
    let mut acc = MPoly::zero(nv);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<MPoly<C>>> =
            (1..n).map(|r| (0..n).filter(|&c| c != j).map(|c| m[r][c].clone()).collect()).collect();
        let t = &m[0][j] * &det_cofactor(&minor);
        acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::rat;

    fn x(i: usize) -> QPoly {
        QPoly::var(2, i)
    }

    #[test]
    fn arithmetic_and_eval() {
        let f = &(&x(0) * &x(0)) - &QPoly::constant(2, rat(2, 1));
        assert_eq!(f.eval(&[rat(3, 1), rat(0, 1)]), rat(7, 1));
        assert_eq!(f.partial(0), x(0).scale(&rat(2, 1)));
        let g = f.subst(&[&x(0) + &x(1), x(1)]);
        assert_eq!(g.eval(&[rat(1, 1), rat(2, 1)]), rat(7, 1));
        assert_eq!(f.to_string(), "x1^2 + -2");
    }

    #[test]
    fn resultant_examples() {
        let r = resultant(&(&x(0) - &x(1)), &(&x(0) + &x(1)), 0).unwrap();
        assert_eq!(r, x(1).scale(&rat(2, 1)));
        let f = &(&x(0) * &x(0)) - &QPoly::constant(2, rat(2, 1));
        let r = resultant(&f, &(&x(0) - &x(1)), 0).unwrap();
        assert_eq!(r, &(&x(1) * &x(1)) - &QPoly::constant(2, rat(2, 1)));
        assert!(resultant(&f, &f, 0).unwrap().is_zero());
        assert!(resultant(&x(1), &x(1), 0).is_err());
    }

    #[test]
    fn exact_division() {
        let a = &x(0) + &x(1);
        let b = &x(0) - &x(1);
        let p = &a * &b;
        assert_eq!(p.div_exact(&a).unwrap(), b);
        assert!(p.div_exact(&(&x(0) + &QPoly::one(2))).is_err());
    }

    #[test]
    fn min_valuation() {
        let f = QPoly::from_terms(3, [([2, 0, 0, 0], rat(3, 1)), ([0, 0, 2, 0], rat(9, 1))]);
        assert_eq!(min_valuation_of_poly(&f, 3).unwrap(), 1);
        let g = QPoly::from_terms(2, [([4, 0, 0, 0], rat(1, 1)), ([3, 1, 0, 0], rat(2, 1))]);
        assert_eq!(min_valuation_of_poly(&g, 2).unwrap(), 0);
        assert!(min_valuation_of_poly(&QPoly::zero(2), 2).is_err());
    }

    #[test]
    fn monomial_lists() {
        assert_eq!(monomials(3, 3).len(), 10);
        assert_eq!(monomials(4, 2).len(), 10);
        assert_eq!(monomials(2, 4)[0], [4, 0, 0, 0]);
    }
}
