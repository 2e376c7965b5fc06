//! Real root isolation for univariate polynomials over Q using Sturm sequences and exact bisection.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::mpoly::QPoly;
use super::rational::{format_rational, rat_to_f64, Rational};
use crate::error::{Error, Result};

/// Dense univariate polynomial over Q, constant term first, no trailing zeros.
pub type QUPoly = Vec<Rational>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsolatingInterval {
    #[serde(serialize_with = "ser_rat")]
    pub low: Rational,
    #[serde(serialize_with = "ser_rat")]
    pub high: Rational,
    pub multiplicity: u32,
}

fn ser_rat<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

impl IsolatingInterval {
    pub fn mid(&self) -> Rational {
        (&self.low + &self.high) / Rational::from_integer(2.into())
    }

    pub fn approx(&self) -> f64 {
        rat_to_f64(&self.mid())
    }
}

pub fn qtrim(mut f: QUPoly) -> QUPoly {
    while f.last().map_or(false, |c| c.is_zero()) {
        f.pop();
    }
    f
}

pub fn qeval(f: &QUPoly, x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in f.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub fn qderiv(f: &QUPoly) -> QUPoly {
    qtrim(f.iter().enumerate().skip(1).map(|(i, c)| c * Rational::from_integer((i as i64).into())).collect())
}

pub fn qdivrem(f: &QUPoly, g: &QUPoly) -> (QUPoly, QUPoly) {
    assert!(!g.is_empty());
    let mut r = f.clone();
    let dg = g.len() - 1;
    if r.len() < g.len() {
        return (vec![], r);
    }
    let mut q = vec![Rational::zero(); r.len() - dg];
    while r.len() >= g.len() {
        let k = r.len() - 1 - dg;
        let c = &r[r.len() - 1] / &g[dg];
        for (i, b) in g.iter().enumerate() {
            r[k + i] = &r[k + i] - &c * b;
        }
        q[k] = c;
        r = qtrim(r);
    }
    (qtrim(q), r)
}

pub fn qgcd(f: &QUPoly, g: &QUPoly) -> QUPoly {
    let mut a = f.clone();
    let mut b = g.clone();
    while !b.is_empty() {
        let r = qdivrem(&a, &b).1;
        a = b;
        b = r;
    }
    match a.last() {
        Some(lc) => {
            let lc = lc.clone();
            a.iter().map(|c| c / &lc).collect()
        }
        None => a,
    }
}

/// Converts a univariate MPoly (in its first variable) to dense form.
pub fn from_mpoly(f: &QPoly) -> QUPoly {
    let d = f.degree_in(0).unwrap_or(0) as usize;
    let mut out = vec![Rational::zero(); d + 1];
    for (m, c) in f.terms() {
        assert!(m[1..].iter().all(|&e| e == 0), "polynomial is not univariate");
        out[m[0] as usize] = c.clone();
    }
    qtrim(out)
}

fn sturm_chain(f: &QUPoly) -> Vec<QUPoly> {
    let mut chain = vec![f.clone(), qderiv(f)];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            break;
        }
        let r = qdivrem(&chain[n - 2], &chain[n - 1]).1;
        if r.is_empty() {
            break;
        }
        chain.push(r.iter().map(|c| -c).collect());
    }
    chain
}

fn sign_changes_at(chain: &[QUPoly], x: &Rational) -> usize {
    let mut last = 0i32;
    let mut n = 0;
    for p in chain {
        let v = qeval(p, x);
        let s = if v.is_positive() { 1 } else if v.is_negative() { -1 } else { 0 };
        if s != 0 {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
    }
    n
}

/// Number of distinct real roots of a square-free f in the half-open interval (a, b].
fn count_roots(chain: &[QUPoly], a: &Rational, b: &Rational) -> usize {
    sign_changes_at(chain, a) - sign_changes_at(chain, b)
}

fn cauchy_bound(f: &QUPoly) -> Rational {
    let lc = f.last().unwrap().abs();
    let m = f[..f.len() - 1].iter().map(|c| c.abs() / &lc).fold(Rational::zero(), |a, b| if b > a { b } else { a });
    m + Rational::one()
}

/// Square-free decomposition over Q: (factor, multiplicity).
pub fn squarefree_q(f: &QUPoly) -> Vec<(QUPoly, u32)> {
    let mut out = Vec::new();
    let mut c = qgcd(f, &qderiv(f));
    let mut w = qdivrem(f, &c).0;
    let mut i = 1;
    while w.len() > 1 {
        let y = qgcd(&w, &c);
        let z = qdivrem(&w, &y).0;
        if z.len() > 1 {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = qdivrem(&c, &w).0;
    }
    out
}

/// Isolates all distinct real roots of a nonzero f, each interval of width at most `width`.
pub fn real_roots_dense(f: &QUPoly, width: &Rational) -> Result<Vec<IsolatingInterval>> {
    let f = qtrim(f.clone());
    if f.is_empty() {
        return Err(Error::Input("real_roots of the zero polynomial".into()));
    }
    let mut out = Vec::new();
    for (g, mult) in squarefree_q(&f) {
        for (lo, hi) in isolate_squarefree(&g, width) {
            out.push(IsolatingInterval { low: lo, high: hi, multiplicity: mult });
        }
    }
    out.sort_by(|a, b| a.low.cmp(&b.low));
    Ok(out)
}

pub fn real_roots(f: &QPoly, width: &Rational) -> Result<Vec<IsolatingInterval>> {
    real_roots_dense(&from_mpoly(f), width)
}

/// Isolating intervals for the roots of a square-free polynomial, refined to the given width.
pub fn isolate_squarefree(g: &QUPoly, width: &Rational) -> Vec<(Rational, Rational)> {
    if g.len() <= 1 {
        return vec![];
    }
    let chain = sturm_chain(g);
    let b = cauchy_bound(g);
    let mut stack = vec![(-b.clone(), b)];
    let mut found = Vec::new();
    let two = Rational::from_integer(2.into());
    while let Some((lo, hi)) = stack.pop() {
        let n = count_roots(&chain, &lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 {
            found.push(refine(&chain, lo, hi, width));
            continue;
        }
        let mid = (&lo + &hi) / &two;
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    found.sort();
    found
}

/// Bisects (lo, hi] containing exactly one root of g down to the target width.
fn refine(chain: &[QUPoly], mut lo: Rational, mut hi: Rational, width: &Rational) -> (Rational, Rational) {
    let two = Rational::from_integer(2.into());
    if qeval(&chain[0], &hi).is_zero() {
        return (hi.clone(), hi);
    }
    while &hi - &lo > *width {
        let mid = (&lo + &hi) / &two;
        if count_roots(chain, &lo, &mid) == 1 {
            if qeval(&chain[0], &mid).is_zero() {
                return (mid.clone(), mid);
            }
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::rat;

    fn qp(c: &[i64]) -> QUPoly {
        qtrim(c.iter().map(|&a| rat(a, 1)).collect())
    }

    #[test]
    fn sqrt_two() {
        let r = real_roots_dense(&qp(&[-2, 0, 1]), &rat(1, 1_000_000)).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].approx() + 2f64.sqrt()).abs() < 1e-6);
        assert!((r[1].approx() - 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn no_roots_and_repeated_roots() {
        assert!(real_roots_dense(&qp(&[1, 0, 1]), &rat(1, 1000)).unwrap().is_empty());
        let r = real_roots_dense(&qp(&[0, 0, 0, 0, 1]), &rat(1, 1000)).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 4);
        assert!(r[0].low <= rat(0, 1) && r[0].high >= rat(0, 1));
    }

    #[test]
    fn rational_roots_are_exact_or_bracketed() {
        // (x - 1/2)(x + 3)(x - 7)
        let f = qtrim(vec![rat(21, 2), rat(-19, 1), rat(-9, 2), rat(1, 1)]);
        let r = real_roots_dense(&f, &rat(1, 1 << 40)).unwrap();
        assert_eq!(r.len(), 3);
        for (iv, x) in r.iter().zip([-3.0, 0.5, 7.0]) {
            assert!((iv.approx() - x).abs() < 1e-9);
        }
    }
}
