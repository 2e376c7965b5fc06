//! Finite fields F_p and F_{p^2}, dense univariate polynomials over them and their factorization.

use super::rational::{is_prime_u64, mul_mod_u64, pow_mod_u64};
use crate::error::{Error, Result};

/// Element a0 + a1*t of F_q; for prime fields a1 = 0.
pub type Fe = [u64; 2];

/// Field context for F_p (deg 1) or F_p[t]/(t^2 - c1 t - c0) (deg 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fq {
    pub p: u64,
    pub deg: u32,
    c0: u64,
    c1: u64,
}

/// Univariate polynomial, coefficients from the constant term upward, no trailing zeros.
pub type UPoly = Vec<Fe>;

impl Fq {
    pub fn prime(p: u64) -> Result<Fq> {
        if !is_prime_u64(p) {
            return Err(Error::Input(format!("{p} is not prime")));
        }
        Ok(Fq { p, deg: 1, c0: 0, c1: 0 })
    }

    /// Prime field without the primality check, for callers that validated p.
    pub fn fp(p: u64) -> Fq {
        Fq { p, deg: 1, c0: 0, c1: 0 }
    }

    /// Quadratic extension F_{p^2}, with the defining quadratic found by search.
    pub fn quadratic(p: u64) -> Result<Fq> {
        let base = Fq::prime(p)?;
        if p == 2 {
            return Ok(Fq { p, deg: 2, c0: 1, c1: 1 });
        }
        let nr = (2..p).find(|&a| !base.is_square(base.elt(a))).unwrap();
        Ok(Fq { p, deg: 2, c0: nr, c1: 0 })
    }

    pub fn base(&self) -> Fq {
        Fq::fp(self.p)
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.deg)
    }

    pub fn elt(&self, a: u64) -> Fe {
        [a % self.p, 0]
    }

    pub fn from_i64(&self, a: i64) -> Fe {
        [a.rem_euclid(self.p as i64) as u64, 0]
    }

    pub fn gen(&self) -> Fe {
        [0, 1]
    }

    pub fn zero(&self) -> Fe {
        [0, 0]
    }

    pub fn one(&self) -> Fe {
        [1 % self.p, 0]
    }

    pub fn is_zero(&self, a: Fe) -> bool {
        a == [0, 0]
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let p = self.p;
        [(a[0] + b[0]) % p, (a[1] + b[1]) % p]
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        let p = self.p;
        [(a[0] + p - b[0]) % p, (a[1] + p - b[1]) % p]
    }

    pub fn neg(&self, a: Fe) -> Fe {
        self.sub([0, 0], a)
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        let p = self.p;
        if self.deg == 1 {
            return [mul_mod_u64(a[0], b[0], p), 0];
        }
        let m = |x: u64, y: u64| mul_mod_u64(x, y, p);
        let hh = m(a[1], b[1]);
        let c0 = (m(a[0], b[0]) + m(hh, self.c0)) % p;
        let c1 = ((m(a[0], b[1]) + m(a[1], b[0])) % p + m(hh, self.c1)) % p;
        [c0, c1]
    }

    pub fn pow(&self, a: Fe, mut e: u128) -> Fe {
        let mut r = self.one();
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: Fe) -> Fe {
        assert!(!self.is_zero(a), "inverse of zero");
        if self.deg == 1 {
            return [pow_mod_u64(a[0], self.p - 2, self.p), 0];
        }
        self.pow(a, self.order() - 2)
    }

    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        self.mul(a, self.inv(b))
    }

    pub fn is_square(&self, a: Fe) -> bool {
        if self.is_zero(a) || self.p == 2 {
            return true;
        }
        self.pow(a, (self.order() - 1) / 2) == self.one()
    }

    /// Square root when it exists.
    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        if self.is_zero(a) {
            return Some(a);
        }
        let q = self.order();
        if self.p == 2 {
            return Some(self.pow(a, q / 2));
        }
        if !self.is_square(a) {
            return None;
        }
        let mut s = 0;
        let mut t = q - 1;
        while t % 2 == 0 {
            t /= 2;
            s += 1;
        }
        let z = self.elements().find(|&z| !self.is_zero(z) && !self.is_square(z)).unwrap();
        let mut m = s;
        let mut c = self.pow(z, t);
        let mut tt = self.pow(a, t);
        let mut r = self.pow(a, (t + 1) / 2);
        while tt != self.one() {
            let mut i = 0;
            let mut t2 = tt;
            while t2 != self.one() {
                t2 = self.mul(t2, t2);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = self.mul(b, b);
            }
            m = i;
            c = self.mul(b, b);
            tt = self.mul(tt, c);
            r = self.mul(r, b);
        }
        Some(r)
    }

    /// p-th root (inverse Frobenius).
    pub fn pth_root(&self, a: Fe) -> Fe {
        self.pow(a, self.order() / self.p as u128)
    }

    /// All field elements; 0 first, then the prime-field elements in order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        let p = self.p;
        let d = self.deg;
        (0..(if d == 1 { 1 } else { p })).flat_map(move |a1| (0..p).map(move |a0| [a0, a1]))
    }

    pub fn is_base(&self, a: Fe) -> bool {
        a[1] == 0
    }

    // ---------- univariate polynomials ----------

    pub fn trim(&self, mut f: UPoly) -> UPoly {
        while f.last().map_or(false, |&c| self.is_zero(c)) {
            f.pop();
        }
        f
    }

    pub fn pdeg(&self, f: &UPoly) -> isize {
        f.len() as isize - 1
    }

    pub fn padd(&self, f: &UPoly, g: &UPoly) -> UPoly {
        let n = f.len().max(g.len());
        let r = (0..n)
            .map(|i| self.add(*f.get(i).unwrap_or(&[0, 0]), *g.get(i).unwrap_or(&[0, 0])))
            .collect();
        self.trim(r)
    }

    pub fn psub(&self, f: &UPoly, g: &UPoly) -> UPoly {
        let n = f.len().max(g.len());
        let r = (0..n)
            .map(|i| self.sub(*f.get(i).unwrap_or(&[0, 0]), *g.get(i).unwrap_or(&[0, 0])))
            .collect();
        self.trim(r)
    }

    pub fn pmul(&self, f: &UPoly, g: &UPoly) -> UPoly {
        if f.is_empty() || g.is_empty() {
            return vec![];
        }
        let mut r = vec![[0, 0]; f.len() + g.len() - 1];
        for (i, &a) in f.iter().enumerate() {
            if self.is_zero(a) {
                continue;
            }
            for (j, &b) in g.iter().enumerate() {
                r[i + j] = self.add(r[i + j], self.mul(a, b));
            }
        }
        self.trim(r)
    }

    pub fn pscale(&self, f: &UPoly, c: Fe) -> UPoly {
        self.trim(f.iter().map(|&a| self.mul(a, c)).collect())
    }

    pub fn monic(&self, f: &UPoly) -> UPoly {
        match f.last() {
            None => vec![],
            Some(&lc) => self.pscale(f, self.inv(lc)),
        }
    }

    pub fn divrem(&self, f: &UPoly, g: &UPoly) -> (UPoly, UPoly) {
        assert!(!g.is_empty(), "polynomial division by zero");
        let mut r = f.clone();
        let dg = g.len() - 1;
        if r.len() < g.len() {
            return (vec![], r);
        }
        let linv = self.inv(g[dg]);
        let mut q = vec![[0, 0]; r.len() - dg];
        while r.len() >= g.len() {
            let k = r.len() - 1 - dg;
            let c = self.mul(r[r.len() - 1], linv);
            q[k] = c;
            for (i, &b) in g.iter().enumerate() {
                r[k + i] = self.sub(r[k + i], self.mul(c, b));
            }
            r = self.trim(r);
        }
        (self.trim(q), r)
    }

    pub fn prem(&self, f: &UPoly, g: &UPoly) -> UPoly {
        self.divrem(f, g).1
    }

    pub fn pgcd(&self, f: &UPoly, g: &UPoly) -> UPoly {
        let mut a = f.clone();
        let mut b = g.clone();
        while !b.is_empty() {
            let r = self.prem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    pub fn pderiv(&self, f: &UPoly) -> UPoly {
        let r = f.iter().enumerate().skip(1).map(|(i, &c)| self.mul(c, self.elt(i as u64))).collect();
        self.trim(r)
    }

    pub fn peval(&self, f: &UPoly, x: Fe) -> Fe {
        let mut acc = [0, 0];
        for &c in f.iter().rev() {
            acc = self.add(self.mul(acc, x), c);
        }
        acc
    }

    pub fn powmod(&self, f: &UPoly, mut e: u128, m: &UPoly) -> UPoly {
        let mut r = vec![self.one()];
        let mut b = self.prem(f, m);
        while e > 0 {
            if e & 1 == 1 {
                r = self.prem(&self.pmul(&r, &b), m);
            }
            b = self.prem(&self.pmul(&b, &b), m);
            e >>= 1;
        }
        r
    }

    /// Square-free factorization: pairs (square-free monic factor, multiplicity).
    pub fn squarefree(&self, f: &UPoly) -> Vec<(UPoly, u32)> {
        let f = self.monic(f);
        if f.len() <= 1 {
            return vec![];
        }
        let mut out = Vec::new();
        let d = self.pderiv(&f);
        if d.is_empty() {
            // f is a p-th power.
            let root: UPoly = f.iter().step_by(self.p as usize).map(|&c| self.pth_root(c)).collect();
            for (g, e) in self.squarefree(&root) {
                out.push((g, e * self.p as u32));
            }
            return out;
        }
        let mut c = self.pgcd(&f, &d);
        let mut w = self.divrem(&f, &c).0;
        let mut i = 1;
        while w.len() > 1 {
            let y = self.pgcd(&w, &c);
            let z = self.divrem(&w, &y).0;
            if z.len() > 1 {
                out.push((self.monic(&z), i));
            }
            i += 1;
            w = y;
            c = self.divrem(&c, &w).0;
        }
        if c.len() > 1 {
            let root: UPoly = c.iter().step_by(self.p as usize).map(|&x| self.pth_root(x)).collect();
            for (g, e) in self.squarefree(&root) {
                out.push((g, e * self.p as u32));
            }
        }
        out
    }

    /// Distinct-degree factorization of a square-free monic polynomial.
    fn ddf(&self, f: &UPoly) -> Vec<(UPoly, u32)> {
        let mut out = Vec::new();
        let mut f = f.clone();
        let x = vec![self.zero(), self.one()];
        let mut h = x.clone();
        let mut d: u32 = 0;
        while f.len() > 1 && 2 * (d as usize + 1) <= f.len() - 1 {
            d += 1;
            h = self.powmod(&h, self.order(), &f);
            let g = self.pgcd(&f, &self.psub(&h, &x));
            if g.len() > 1 {
                out.push((g.clone(), d));
                f = self.divrem(&f, &g).0;
                h = self.prem(&h, &f);
            }
        }
        if f.len() > 1 {
            let dd = (f.len() - 1) as u32;
            out.push((self.monic(&f), dd));
        }
        out
    }

    /// Equal-degree splitting (Cantor-Zassenhaus) of a product of irreducibles of degree d.
    fn edf(&self, f: &UPoly, d: u32, seed: &mut u64) -> Vec<UPoly> {
        let n = f.len() - 1;
        if n as u32 == d {
            return vec![f.clone()];
        }
        loop {
            let a: UPoly = self.trim(
                (0..n)
                    .map(|_| {
                        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                        let r = *seed >> 11;
                        if self.deg == 1 {
                            [r % self.p, 0]
                        } else {
                            [r % self.p, (r / self.p) % self.p]
                        }
                    })
                    .collect(),
            );
            if a.len() < 2 {
                continue;
            }
            let b = if self.p == 2 {
                // Trace map a + a^2 + ... + a^(2^(k d - 1)) with q^d = 2^(k d).
                let m = self.deg * d;
                let mut t = a.clone();
                let mut acc = a.clone();
                for _ in 1..m {
                    t = self.prem(&self.pmul(&t, &t), f);
                    acc = self.padd(&acc, &t);
                }
                acc
            } else {
                let e = (self.order().pow(d) - 1) / 2;
                self.psub(&self.powmod(&a, e, f), &vec![self.one()])
            };
            let g = self.pgcd(f, &b);
            if g.len() > 1 && g.len() < f.len() {
                let h = self.divrem(f, &g).0;
                let mut out = self.edf(&g, d, seed);
                out.extend(self.edf(&self.monic(&h), d, seed));
                return out;
            }
        }
    }

    /// Complete factorization into monic irreducibles with multiplicities, sorted by degree.
    pub fn factor(&self, f: &UPoly) -> Vec<(UPoly, u32)> {
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut out = Vec::new();
        for (g, e) in self.squarefree(f) {
            for (h, d) in self.ddf(&g) {
                for k in self.edf(&h, d, &mut seed) {
                    out.push((k, e));
                }
            }
        }
        out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(&b.0)));
        out
    }

    /// Distinct roots in F_q.
    pub fn roots(&self, f: &UPoly) -> Vec<Fe> {
        let f = self.monic(&self.trim(f.clone()));
        if f.len() <= 1 {
            return vec![];
        }
        let x = vec![self.zero(), self.one()];
        let xq = self.powmod(&x, self.order(), &f);
        let g = self.pgcd(&f, &self.psub(&xq, &x));
        if g.len() <= 1 {
            return vec![];
        }
        let mut seed = 0x2545f4914f6cdd1du64;
        let mut r: Vec<Fe> = self.edf(&g, 1, &mut seed).iter().map(|l| self.neg(l[0])).collect();
        r.sort();
        r
    }

    pub fn is_irreducible(&self, f: &UPoly) -> bool {
        let fac = self.factor(f);
        fac.len() == 1 && fac[0].1 == 1
    }

    /// Applies the Frobenius a -> a^p to every coefficient (conjugation over F_p).
    pub fn conj(&self, a: Fe) -> Fe {
        self.pow(a, self.p as u128)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(k: &Fq, c: &[i64]) -> UPoly {
        k.trim(c.iter().map(|&a| k.from_i64(a)).collect())
    }

    #[test]
    fn factor_examples() {
        let k = Fq::prime(5).unwrap();
        let f = k.factor(&up(&k, &[-1, 0, 1]));
        assert_eq!(f, vec![(up(&k, &[1, 1]), 1), (up(&k, &[-1, 1]), 1)]);
        let k3 = Fq::prime(3).unwrap();
        assert_eq!(k3.factor(&up(&k3, &[1, 0, 1])), vec![(up(&k3, &[1, 0, 1]), 1)]);
        let k7 = Fq::prime(7).unwrap();
        assert_eq!(k7.factor(&up(&k7, &[0, 0, 0, 0, 1])), vec![(up(&k7, &[0, 1]), 4)]);
    }

    #[test]
    fn factor_reexpands_everywhere() {
        for &p in &[2u64, 3, 5, 7, 11, 13] {
            for ext in [false, true] {
                let k = if ext { Fq::quadratic(p).unwrap() } else { Fq::prime(p).unwrap() };
                let mut seed = 12345u64;
                for _ in 0..40 {
                    let deg = 1 + (seed % 6) as usize;
                    let mut f: UPoly = (0..deg)
                        .map(|_| {
                            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
                            let r = seed >> 20;
                            if ext {
                                [r % p, (r / p) % p]
                            } else {
                                [r % p, 0]
                            }
                        })
                        .collect();
                    f.push(k.one());
                    let fac = k.factor(&f);
                    let mut prod = vec![k.one()];
                    for (g, e) in &fac {
                        assert!(g.last() == Some(&k.one()));
                        for _ in 0..*e {
                            prod = k.pmul(&prod, g);
                        }
                        if g.len() - 1 <= 4 && !ext {
                            // Exhaustive divisor check for small degree.
                            assert!(k.roots(g).is_empty() || g.len() == 2);
                        }
                    }
                    assert_eq!(prod, f, "p={p} ext={ext}");
                }
            }
        }
    }

    #[test]
    fn quadratic_extension_sqrt() {
        for &p in &[2u64, 3, 5, 7, 13] {
            let k = Fq::quadratic(p).unwrap();
            for a in k.elements() {
                match k.sqrt(a) {
                    Some(s) => assert_eq!(k.mul(s, s), a),
                    None => assert!(!k.is_base(a)),
                }
            }
        }
    }

    #[test]
    fn roots_match_brute_force() {
        let k = Fq::prime(13).unwrap();
        let f = up(&k, &[6, -5, 1, 0, 3]);
        let brute: Vec<Fe> = k.elements().filter(|&x| k.is_zero(k.peval(&f, x))).collect();
        assert_eq!(k.roots(&f), brute);
    }
}
