//! Solubility of genus one models over Q_p (with certificates) and over R, and a brute-force
//! oracle working modulo p^k.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exactmath::rational::{check_prime, rat, val_rat, Valuation};
use crate::exactmath::realroots::{qeval, real_roots_dense, QUPoly};
use crate::exactmath::{min_valuation_of_poly, Mono, QPoly, Rational};
use crate::models::{invariants, is_nonsingular, mat_det, GenusOneModel, Mat, Transformation};
use crate::redgeom::{common_linear_factor, nonregular_among, reduce_model, Chart, FpPoly, ReducedModel};
use crate::steps::{
    chart_permutation, clear_denominators, forms_to_first_affine, pencil, ratp, scale2, scale3, shift_y, subst, weighted, Walk,
};

/// Iteration cap for the normalisation loops of step (i).
const STEP_ONE_CAP: usize = 10_000;

/// A transformation taking the input model to one whose reduction has a smooth k-point.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub transformation: Transformation,
    /// The transformed model, p-integral.
    pub model: GenusOneModel,
    /// A smooth point of the reduction of `model`: (x1, x2, y) for degree 2, else (x1, ..., xn).
    pub witness: Vec<u64>,
}

impl Certificate {
    fn new(w: &Walk, pt: &[u64]) -> Self {
        Certificate { transformation: w.g.clone(), model: w.model.clone(), witness: pt.to_vec() }
    }

    /// Re-derives the transformed model and confirms the witness is a smooth point of its reduction.
    pub fn verify(&self, original: &GenusOneModel, p: u64) -> bool {
        let Ok(m) = self.transformation.apply(original) else { return false };
        if m != self.model || !m.is_p_integral(p) {
            return false;
        }
        let Ok(red) = reduce_model(&m, p) else { return false };
        red.equations().iter().all(|f| f.eval(&self.witness, p) == 0) && red.is_smooth_at(&self.witness)
    }

    /// A point of the transformed model modulo p^k lifting the witness (Hensel's lemma).
    pub fn lift(&self, p: u64, k: u32) -> Result<Vec<BigInt>> {
        if k == 0 {
            return Err(Error::Input("lift precision must be positive".into()));
        }
        let modulus = BigInt::from(p).pow(k);
        let eqs: Vec<Vec<(Mono, BigInt)>> = self
            .model
            .equations()
            .iter()
            .map(|f| f.terms().map(|(m, c)| Ok((*m, rat_mod_big(c, &modulus)?))).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let nv = self.witness.len();
        let partials: Vec<Vec<Vec<(Mono, BigInt)>>> = eqs.iter().map(|f| (0..nv).map(|i| big_partial(f, i)).collect()).collect();
        let mut x: Vec<BigInt> = self.witness.iter().map(|&a| BigInt::from(a)).collect();
        let pb = BigInt::from(p);
        let unit = |a: &BigInt| !(a.mod_floor(&pb)).is_zero();
        for _ in 0..(2 * k + 4) {
            let vals: Vec<BigInt> = eqs.iter().map(|f| big_eval(f, &x, &modulus)).collect();
            if vals.iter().all(|v| v.is_zero()) {
                return Ok(x);
            }
            let jac: Vec<Vec<BigInt>> = partials.iter().map(|row| row.iter().map(|d| big_eval(d, &x, &modulus)).collect()).collect();
            if eqs.len() == 1 {
                let i = (0..nv).find(|&i| unit(&jac[0][i])).ok_or_else(|| Error::Domain("witness is not smooth".into()))?;
                let inv = modinv(&jac[0][i], &modulus);
                x[i] = (&x[i] - &vals[0] * inv).mod_floor(&modulus);
            } else {
                let (i, j, det) = (0..nv)
                    .flat_map(|i| (i + 1..nv).map(move |j| (i, j)))
                    .map(|(i, j)| (i, j, (&jac[0][i] * &jac[1][j] - &jac[0][j] * &jac[1][i]).mod_floor(&modulus)))
                    .find(|(_, _, d)| unit(d))
                    .ok_or_else(|| Error::Domain("witness is not smooth".into()))?;
                let inv = modinv(&det, &modulus);
                let di = (&jac[1][j] * &vals[0] - &jac[0][j] * &vals[1]) * &inv;
                let dj = (&jac[0][i] * &vals[1] - &jac[1][i] * &vals[0]) * &inv;
                x[i] = (&x[i] - di).mod_floor(&modulus);
                x[j] = (&x[j] - dj).mod_floor(&modulus);
            }
        }
        Err(Error::Precision("Newton iteration did not converge".into()))
    }

    pub fn to_json(&self, p: u64, lift_precision: Option<u32>) -> Result<Value> {
        let mut v = serde_json::json!({
            "transformation": self.transformation.to_json(),
            "model": self.model.to_json(),
            "witness_mod_p": self.witness,
            "lift_precision": lift_precision.unwrap_or(1),
        });
        if let Some(k) = lift_precision {
            let pt = self.lift(p, k)?;
            v["lifted_point"] = Value::Array(pt.iter().map(|a| Value::String(a.to_string())).collect());
        }
        Ok(v)
    }
}

fn rat_mod_big(c: &Rational, m: &BigInt) -> Result<BigInt> {
    let d = c.denom().mod_floor(m);
    let g = d.gcd(m);
    if !g.is_one() {
        return Err(Error::Input("coefficient is not p-integral".into()));
    }
    Ok((c.numer() * modinv(&d, m)).mod_floor(m))
}

fn modinv(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    e.x.mod_floor(m)
}

fn big_partial(f: &[(Mono, BigInt)], i: usize) -> Vec<(Mono, BigInt)> {
    f.iter()
        .filter(|(m, _)| m[i] > 0)
        .map(|(m, c)| {
            let mut mm = *m;
            mm[i] -= 1;
            (mm, c * BigInt::from(m[i]))
        })
        .collect()
}

fn big_eval(f: &[(Mono, BigInt)], x: &[BigInt], m: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for (mono, c) in f {
        let mut t = c.clone();
        for (i, &e) in mono.iter().enumerate().take(x.len()) {
            for _ in 0..e {
                t = (t * &x[i]).mod_floor(m);
            }
        }
        acc += t;
    }
    acc.mod_floor(m)
}

fn vpoly(f: &QPoly, p: u64) -> Option<i64> {
    if f.is_zero() {
        None
    } else {
        min_valuation_of_poly(f, p).ok()
    }
}

fn at_least(v: Option<i64>, k: i64) -> bool {
    v.map_or(true, |v| v >= k)
}

fn p_pow(p: u64, e: i64) -> Rational {
    let base = ratp(p);
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

/// x_i <- u_i + p x_i (i < n), keeping the last coordinate.
fn recentre(u: &[u64], n: usize, p: u64) -> Mat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == n - 1 {
                        rat(i64::from(j == n - 1), 1)
                    } else if j == i {
                        ratp(p)
                    } else if j == n - 1 {
                        rat(u[i] as i64, 1)
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

enum StepOne {
    Done(Certificate),
    Model(Walk),
}

struct Search {
    p: u64,
    max_depth: usize,
}

impl Search {
    fn chart(&self, w: Walk, depth: usize) -> Result<Option<Certificate>> {
        if depth > self.max_depth {
            return Err(Error::Budget(format!("local solubility recursion deeper than {}", self.max_depth)));
        }
        let p = self.p;
        let w = match w.model.degree() {
            2 => self.step_one_deg2(w)?,
            3 => self.step_one_deg3(w)?,
            _ => match self.step_one_deg4(w)? {
                StepOne::Done(c) => return Ok(Some(c)),
                StepOne::Model(w) => w,
            },
        };
        let red = reduce_model(&w.model, p)?;
        let sv = red.survey(Chart::Affine)?;
        if let Some((pt, _)) = sv.smooth.first() {
            return Ok(Some(Certificate::new(&w, pt)));
        }
        let nx = if w.model.degree() == 2 { 2 } else { w.model.degree() };
        let mut seen = BTreeSet::new();
        for np in nonregular_among(&w.model, &red, &sv.singular) {
            let u: Vec<u64> = np.coords[..nx - 1].to_vec();
            if !seen.insert(u.clone()) {
                continue;
            }
            let next = w.then(&subst(w.model.degree(), &recentre(&u, nx, p)))?;
            if let Some(c) = self.chart(next, depth + 1)? {
                return Ok(Some(c));
            }
        }
        Ok(None)
    }

    /// Shifts y so that the reduction is y^2 when it is a double curve, and rescales while
    /// v(P) >= 1 and v(Q) >= 2.
    fn step_one_deg2(&self, mut w: Walk) -> Result<Walk> {
        let p = self.p;
        for _ in 0..STEP_ONE_CAP {
            let red = reduce_model(&w.model, p)?;
            let Some(r) = double_curve_shift(&red) else { return Ok(w) };
            if r.iter().any(|&c| c != 0) {
                w = w.then(&shift_y([rat(r[0] as i64, 1), rat(r[1] as i64, 1), rat(r[2] as i64, 1)]))?;
            }
            let f = w.model.forms();
            if at_least(vpoly(&f[0], p), 1) && at_least(vpoly(&f[1], p), 2) {
                w = w.then(&scale2(ratp(p).recip()))?;
            } else {
                return Ok(w);
            }
        }
        Err(Error::Budget("step (i) did not stabilise".into()))
    }

    fn step_one_deg3(&self, w: Walk) -> Result<Walk> {
        let v = vpoly(&w.model.forms()[0], self.p).ok_or_else(|| Error::Domain("zero cubic".into()))?;
        if v == 0 {
            Ok(w)
        } else {
            w.then(&scale3(p_pow(self.p, -v)))
        }
    }

    fn step_one_deg4(&self, mut w: Walk) -> Result<StepOne> {
        let p = self.p;
        for _ in 0..STEP_ONE_CAP {
            let f = w.model.forms();
            let v1 = vpoly(&f[0], p).ok_or_else(|| Error::Domain("zero quadric".into()))?;
            if v1 > 0 {
                w = w.then(&pencil(vec![vec![p_pow(p, -v1), Rational::zero()], vec![Rational::zero(), Rational::one()]]))?;
                continue;
            }
            let red = reduce_model(&w.model, p)?;
            if let Some(c) = proportion(&red.forms[0], &red.forms[1], p) {
                let cq = rat(c as i64, 1);
                let diff = &f[1] - &f[0].scale(&cq);
                let v = vpoly(&diff, p).ok_or_else(|| Error::Domain("dependent quadrics".into()))?;
                let s = p_pow(p, -v);
                w = w.then(&pencil(vec![vec![Rational::one(), Rational::zero()], vec![-(&cq * &s), s]]))?;
                continue;
            }
            match common_linear_factor(&red.forms[0], &red.forms[1], p) {
                Some(l) if l[..3].iter().any(|&c| c != 0) => {
                    // Off the plane l = 0 every point of the reduction is smooth.
                    if let Some(pt) = red.smooth_point(Chart::Affine)? {
                        return Ok(StepOne::Done(Certificate::new(&w, &pt)));
                    }
                    let s = forms_to_first_affine(&[l], 4, p)?;
                    w = w.then(&subst(4, &s))?;
                    let inv = ratp(p).recip();
                    let one = Rational::one();
                    w = w.then(&weighted(4, &[ratp(p), one.clone(), one.clone(), one], &[inv.clone(), inv]))?;
                }
                _ => return Ok(StepOne::Model(w)),
            }
        }
        Err(Error::Budget("step (i) did not stabilise".into()))
    }
}

/// The c with q2 = c q1 over F_p, when q1 is nonzero and such c exists.
fn proportion(q1: &FpPoly, q2: &FpPoly, p: u64) -> Option<u64> {
    let (m, a) = q1.terms.first()?;
    let c = crate::redgeom::mulm(q2.coeff(m), crate::redgeom::invm(*a, p), p);
    if q2.sub(&q1.scale(c, p), p).is_zero() {
        Some(c)
    } else {
        None
    }
}

/// For a double-curve reduction (y - r)^2 of y^2 + P y = Q, the coefficients of r lifted to [0, p).
fn double_curve_shift(red: &ReducedModel) -> Option<[u64; 3]> {
    let p = red.p;
    let (pp, qq) = (&red.forms[0], &red.forms[1]);
    let c2 = |f: &FpPoly| [f.coeff(&[2, 0, 0, 0]), f.coeff(&[1, 1, 0, 0]), f.coeff(&[0, 2, 0, 0])];
    if p == 2 {
        let q = |m: Mono| qq.coeff(&m);
        if !pp.is_zero() || q([3, 1, 0, 0]) != 0 || q([1, 3, 0, 0]) != 0 {
            return None;
        }
        return Some([q([4, 0, 0, 0]), q([2, 2, 0, 0]), q([0, 4, 0, 0])]);
    }
    if !pp.mul(pp, p).add(&qq.scale(4, p), p).is_zero() {
        return None;
    }
    let half = crate::redgeom::invm(2, p);
    Some(c2(pp).map(|c| crate::redgeom::mulm(p - c % p, half, p) % p))
}

fn check_model(model: &GenusOneModel, p: u64) -> Result<()> {
    check_prime(p)?;
    if !is_nonsingular(model) {
        return Err(Error::Domain("singular model".into()));
    }
    Ok(())
}

/// Decides Q_p-solubility; Some(certificate) when soluble.
pub fn is_soluble(model: &GenusOneModel, p: u64) -> Result<Option<Certificate>> {
    check_model(model, p)?;
    let w0 = Walk::new(model).then(&clear_denominators(model))?;
    let red = reduce_model(&w0.model, p)?;
    if !red.is_zero() {
        if let Some(pt) = red.smooth_point(Chart::Full)? {
            return Ok(Some(Certificate::new(&w0, &pt)));
        }
    }
    let n = model.degree();
    let nx = if n == 2 { 2 } else { n };
    let vd = match val_rat(&invariants(&w0.model).disc, p) {
        Valuation::Finite(v) => v.max(0) as usize,
        Valuation::Infinity => 0,
    };
    let search = Search { p, max_depth: 8 * vd + 32 };
    for c in (0..nx).rev() {
        let w = w0.then(&subst(n, &chart_permutation(nx, c)))?;
        if let Some(cert) = search.chart(w, 0)? {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

fn is_soluble_of_degree(model: &GenusOneModel, p: u64, degree: usize) -> Result<Option<Certificate>> {
    if model.degree() != degree {
        return Err(Error::Input(format!("expected a model of degree {degree}")));
    }
    is_soluble(model, p)
}

pub fn is_soluble_deg2(model: &GenusOneModel, p: u64) -> Result<Option<Certificate>> {
    is_soluble_of_degree(model, p, 2)
}

pub fn is_soluble_deg3(model: &GenusOneModel, p: u64) -> Result<Option<Certificate>> {
    is_soluble_of_degree(model, p, 3)
}

pub fn is_soluble_deg4(model: &GenusOneModel, p: u64) -> Result<Option<Certificate>> {
    is_soluble_of_degree(model, p, 4)
}

// ---------------------------------------------------------------------------
// Brute-force oracle

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BruteForce {
    /// A point satisfying the Hensel condition (or an exact root) was found.
    Soluble,
    /// No primitive point exists modulo some power of p.
    Insoluble,
    /// Points survive modulo p^k but none is yet Hensel-liftable.
    Unknown,
}

/// Largest number of residue classes examined by the oracle.
pub const BRUTE_NODE_CAP: usize = 5_000_000;

type IPoly = Vec<(Mono, i128)>;

fn overflow() -> Error {
    Error::Budget("integer overflow in the brute-force search".into())
}

fn ieval(f: &IPoly, x: &[i128]) -> Result<i128> {
    let mut acc: i128 = 0;
    for (m, c) in f {
        let mut t = *c;
        for (i, &e) in m.iter().enumerate().take(x.len()) {
            for _ in 0..e {
                t = t.checked_mul(x[i]).ok_or_else(overflow)?;
            }
        }
        acc = acc.checked_add(t).ok_or_else(overflow)?;
    }
    Ok(acc)
}

fn ipartial(f: &IPoly, i: usize) -> IPoly {
    f.iter()
        .filter(|(m, _)| m[i] > 0)
        .map(|(m, c)| {
            let mut mm = *m;
            mm[i] -= 1;
            (mm, c * i128::from(m[i]))
        })
        .collect()
}

/// p-adic valuation, None for zero.
fn ival(a: i128, p: i128) -> Option<u32> {
    if a == 0 {
        return None;
    }
    let (mut a, mut v) = (a, 0);
    while a % p == 0 {
        a /= p;
        v += 1;
    }
    Some(v)
}

struct Oracle {
    p: i128,
    eqs: Vec<IPoly>,
    partials: Vec<Vec<IPoly>>,
    nvars: usize,
}

impl Oracle {
    /// Hensel's criterion at t for the variables in `free`.
    fn liftable(&self, t: &[i128], vals: &[i128], free: &[usize]) -> Result<bool> {
        let p = self.p;
        let vf = vals.iter().filter_map(|&v| ival(v, p)).min();
        let Some(vf) = vf else { return Ok(true) };
        let jac: Vec<Vec<i128>> =
            self.partials.iter().map(|row| free.iter().map(|&i| ieval(&row[i], t)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
        let e = if self.eqs.len() == 1 {
            jac[0].iter().filter_map(|&d| ival(d, p)).min()
        } else {
            let mut best: Option<u32> = None;
            for a in 0..free.len() {
                for b in a + 1..free.len() {
                    let l = jac[0][a].checked_mul(jac[1][b]).ok_or_else(overflow)?;
                    let r = jac[0][b].checked_mul(jac[1][a]).ok_or_else(overflow)?;
                    if let Some(v) = ival(l.checked_sub(r).ok_or_else(overflow)?, p) {
                        best = Some(best.map_or(v, |x: u32| x.min(v)));
                    }
                }
            }
            best
        };
        Ok(e.map_or(false, |e| vf > 2 * e))
    }

    /// Searches the chart x_c = 1, x_j in pZ_p for c < j < nx. Returns Some(true) if soluble,
    /// Some(false) if the chart has no points modulo some p^j, None if undecided at level k.
    fn chart(&self, c: usize, nx: usize, k: u32, budget: &mut usize) -> Result<Option<bool>> {
        let p = self.p;
        let free: Vec<usize> = (0..self.nvars).filter(|&i| i != c).collect();
        let mut start = vec![0i128; self.nvars];
        start[c] = 1;
        let mut nodes = vec![start];
        let mut pj: i128 = 1;
        for level in 0..k {
            let next_mod = pj.checked_mul(p).ok_or_else(overflow)?;
            let mut next = Vec::new();
            let combos = (p as u64).pow(free.len() as u32);
            for node in &nodes {
                'digits: for idx in 0..combos {
                    let mut t = node.clone();
                    let mut rest = idx;
                    for &i in &free {
                        let d = (rest % p as u64) as i128;
                        rest /= p as u64;
                        if level == 0 && i > c && i < nx && d != 0 {
                            continue 'digits;
                        }
                        t[i] += d * pj;
                    }
                    let vals: Vec<i128> = self.eqs.iter().map(|f| ieval(f, &t)).collect::<Result<_>>()?;
                    if vals.iter().any(|v| v % next_mod != 0) {
                        continue;
                    }
                    if self.liftable(&t, &vals, &free)? {
                        return Ok(Some(true));
                    }
                    *budget = budget.checked_sub(1).ok_or_else(|| Error::Budget("brute-force node cap reached".into()))?;
                    next.push(t);
                }
            }
            if next.is_empty() {
                return Ok(Some(false));
            }
            nodes = next;
            pj = next_mod;
        }
        Ok(None)
    }
}

fn to_ipoly(f: &QPoly) -> Result<IPoly> {
    f.terms()
        .map(|(m, c)| {
            if !c.is_integer() {
                return Err(Error::Input("non-integral coefficient".into()));
            }
            Ok((*m, c.numer().to_i128().ok_or_else(overflow)?))
        })
        .collect()
}

/// Exhaustive search for primitive points modulo p^k.
pub fn brute_force_soluble(model: &GenusOneModel, p: u64, k: u32) -> Result<BruteForce> {
    check_prime(p)?;
    if k == 0 {
        return Err(Error::Input("precision k must be positive".into()));
    }
    let m = clear_denominators(model).apply(model)?;
    let eqs: Vec<IPoly> = m.equations().iter().map(to_ipoly).collect::<Result<_>>()?;
    let nvars = if model.degree() == 2 { 3 } else { model.degree() };
    let nx = if model.degree() == 2 { 2 } else { nvars };
    let partials = eqs.iter().map(|f| (0..nvars).map(|i| ipartial(f, i)).collect()).collect();
    let oracle = Oracle { p: p as i128, eqs, partials, nvars };
    let mut budget = BRUTE_NODE_CAP;
    let mut all_empty = true;
    for c in 0..nx {
        match oracle.chart(c, nx, k, &mut budget)? {
            Some(true) => return Ok(BruteForce::Soluble),
            Some(false) => {}
            None => all_empty = false,
        }
    }
    Ok(if all_empty { BruteForce::Insoluble } else { BruteForce::Unknown })
}

// ---------------------------------------------------------------------------
// The real place

fn dense_in_x(f: &QPoly, degree: usize) -> QUPoly {
    (0..=degree).map(|i| f.coeff(&[i as u8, (degree - i) as u8, 0, 0])).collect()
}

/// Symmetric matrix of a quaternary quadratic form.
fn sym4(q: &QPoly) -> Mat {
    let half = rat(1, 2);
    (0..4)
        .map(|i| {
            (0..4)
                .map(|j| {
                    let mut m = [0u8; 4];
                    m[i] += 1;
                    m[j] += 1;
                    let c = q.coeff(&m);
                    if i == j {
                        c
                    } else {
                        c * &half
                    }
                })
                .collect()
        })
        .collect()
}

fn is_definite(a: &Mat) -> bool {
    let minors: Vec<Rational> = (1..=a.len()).map(|k| mat_det(&a[..k].iter().map(|r| r[..k].to_vec()).collect::<Vec<_>>())).collect();
    let pos = minors.iter().all(|d| d.is_positive());
    let neg = minors.iter().enumerate().all(|(k, d)| if k % 2 == 0 { d.is_negative() } else { d.is_positive() });
    pos || neg
}

/// Sample points strictly between and beyond the distinct real roots of a nonzero polynomial.
fn separating_samples(f: &QUPoly) -> Result<Vec<Rational>> {
    let mut width = rat(1, 1 << 10);
    for _ in 0..30 {
        let roots = real_roots_dense(f, &width)?;
        if roots.is_empty() {
            return Ok(vec![Rational::zero()]);
        }
        if roots.windows(2).all(|w| w[0].high < w[1].low) {
            let mut out = vec![&roots[0].low - Rational::one(), &roots[roots.len() - 1].high + Rational::one()];
            for w in roots.windows(2) {
                out.push((&w[0].high + &w[1].low) / rat(2, 1));
            }
            if out.iter().all(|t| !qeval(f, t).is_zero()) {
                return Ok(out);
            }
        }
        width = width / rat(1 << 20, 1);
    }
    Err(Error::Precision("could not separate the real roots".into()))
}

/// Decides R-solubility.
pub fn is_soluble_real(model: &GenusOneModel) -> Result<bool> {
    let forms = model.forms();
    match model.degree() {
        3 => Ok(true),
        2 => {
            let f = &(&forms[0] * &forms[0]) + &forms[1].scale(&rat(4, 1));
            let dense = dense_in_x(&f, 4);
            if dense[4].is_zero() {
                return Ok(true);
            }
            let trimmed = crate::exactmath::realroots::qtrim(dense.clone());
            if !real_roots_dense(&trimmed, &rat(1, 1))?.is_empty() {
                return Ok(true);
            }
            Ok(dense[4].is_positive())
        }
        _ => {
            let (a, b) = (sym4(&forms[0]), sym4(&forms[1]));
            let member = |t: &Rational| -> Mat {
                (0..4).map(|i| (0..4).map(|j| t * &a[i][j] + &b[i][j]).collect()).collect()
            };
            // det(tA + B) interpolated from five values.
            let xs: Vec<Rational> = (0..5).map(|i| rat(i, 1)).collect();
            let ys: Vec<Rational> = xs.iter().map(|t| mat_det(&member(t))).collect();
            let f = crate::exactmath::realroots::qtrim(interpolate(&xs, &ys));
            if f.is_empty() {
                return Ok(true);
            }
            if is_definite(&a) {
                return Ok(false);
            }
            for t in separating_samples(&f)? {
                if is_definite(&member(&t)) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Coefficients (constant first) of the interpolating polynomial through the given points.
fn interpolate(xs: &[Rational], ys: &[Rational]) -> QUPoly {
    let n = xs.len();
    let mut out = vec![Rational::zero(); n];
    for i in 0..n {
        let mut basis = vec![Rational::one()];
        let mut denom = Rational::one();
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut next = vec![Rational::zero(); basis.len() + 1];
            for (k, c) in basis.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * &xs[j];
            }
            basis = next;
            denom *= &xs[i] - &xs[j];
        }
        let s = &ys[i] / denom;
        for (k, c) in basis.iter().enumerate() {
            out[k] += c * &s;
        }
    }
    out
}

#[cfg(test)]
mod tests;
