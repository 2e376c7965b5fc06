//! Bounded rational point search on integral genus one models.
//!
//! Degrees 2 and 3 enumerate the coordinate box after a residue sieve modulo 11 and 13. Degree 4
//! splits C(Q) into residue classes modulo p^j for a prime p of good reduction; the points of one
//! class lie in a lattice of determinant p^(5j) spanned by a lift P0 of the class to precision
//! p^(2j), its tangent direction scaled by p^j, and p^(2j) Z^4. Short vectors of each lattice are
//! enumerated after LLL reduction.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactmath::rational::{exact_sqrt, is_prime_u64};
use crate::models::{invariants, GenusOneModel, QUAD_PAIRS};
use crate::redgeom::{kernel, projective_solutions, rank, reduce_model, solve_linear};

const SIEVE_PRIMES: [u64; 2] = [11, 13];
/// Largest number of coordinate pairs visited by the degree 2 and 3 searches.
const MAX_PAIRS: u128 = 4_000_000_000;
/// Largest number of residue classes visited by the degree 4 search.
const MAX_CLASSES: u128 = 50_000_000;

/// All points with primitive integer coordinates of absolute value at most `h`, each normalized
/// with its first nonzero coordinate positive (degree 2: first nonzero of x1, x2), sorted.
pub fn search_points(model: &GenusOneModel, h: u64) -> Result<Vec<Vec<BigInt>>> {
    if !model.is_integral() {
        return Err(Error::Input("search needs an integral model".into()));
    }
    let c: Vec<i128> = model
        .coeffs()
        .iter()
        .map(|q| q.to_integer().to_i128().filter(|v| v.abs() < 1 << 40))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Input("coefficients too large for the search".into()))?;
    if h == 0 {
        return Ok(Vec::new());
    }
    if h > 1 << 24 {
        return Err(Error::Budget(format!("height cap {h} too large")));
    }
    let pts = match model.degree() {
        2 => search_deg2(&c, h as i128)?,
        3 => search_deg3(&c, h as i128)?,
        _ => search_deg4(model, &c, h as i128)?,
    };
    Ok(pts.into_iter().map(|v| v.into_iter().map(BigInt::from).collect()).collect())
}

fn gcd(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

fn canonical(mut v: Vec<i128>, lead: usize) -> Vec<i128> {
    if let Some(i) = (0..lead).find(|&i| v[i] != 0) {
        if v[i] < 0 {
            for x in v.iter_mut().take(lead) {
                *x = -*x;
            }
        }
    }
    v
}

fn sieve_table(p: u64, ok: impl Fn(i128, i128, i128) -> bool) -> Vec<bool> {
    let p = p as i128;
    let mut t = vec![false; (p * p) as usize];
    for a in 0..p {
        for b in 0..p {
            t[(a * p + b) as usize] = (0..p).any(|z| ok(a, b, z));
        }
    }
    t
}

fn sieves(ok: impl Fn(i128, i128, i128, i128) -> bool + Copy) -> Vec<(i128, Vec<bool>)> {
    SIEVE_PRIMES.iter().map(|&p| (p as i128, sieve_table(p, |a, b, z| ok(a, b, z, p as i128)))).collect()
}

fn passes(sv: &[(i128, Vec<bool>)], a: i128, b: i128) -> bool {
    sv.iter().all(|(p, t)| t[(a.rem_euclid(*p) * p + b.rem_euclid(*p)) as usize])
}

// ---------------------------------------------------------------------------
// Degree 2

fn binary(c: &[i128], x1: i128, x2: i128) -> Option<i128> {
    let d = c.len() - 1;
    let mut acc: i128 = 0;
    for (i, ci) in c.iter().enumerate() {
        let t = ci.checked_mul(x1.checked_pow((d - i) as u32)?)?.checked_mul(x2.checked_pow(i as u32)?)?;
        acc = acc.checked_add(t)?;
    }
    Some(acc)
}

fn binary_big(c: &[i128], x1: i128, x2: i128) -> BigInt {
    let d = c.len() - 1;
    let (a, b) = (BigInt::from(x1), BigInt::from(x2));
    c.iter()
        .enumerate()
        .map(|(i, ci)| BigInt::from(*ci) * num_traits::pow(a.clone(), d - i) * num_traits::pow(b.clone(), i))
        .sum()
}

fn search_deg2(c: &[i128], h: i128) -> Result<Vec<Vec<i128>>> {
    let (pc, qc) = (&c[..3], &c[3..]);
    if (h as u128 + 1) * (2 * h as u128 + 1) > MAX_PAIRS {
        return Err(Error::Budget(format!("degree 2 search to {h} exceeds the enumeration budget")));
    }
    let sv = sieves(|a, b, y, p| {
        let pv = binary(pc, a, b).unwrap();
        let qv = binary(qc, a, b).unwrap();
        (y * y + pv * y - qv).rem_euclid(p) == 0
    });
    let rows: Vec<Vec<Vec<i128>>> = (0..=h)
        .into_par_iter()
        .map(|x2| {
            let mut out = Vec::new();
            let range: Vec<i128> = if x2 == 0 { vec![1] } else { (-h..=h).collect() };
            for x1 in range {
                if gcd(x1, x2) != 1 || !passes(&sv, x1, x2) {
                    continue;
                }
                for y in deg2_fibre(pc, qc, x1, x2) {
                    out.push(vec![x1, x2, y]);
                }
            }
            out
        })
        .collect();
    let mut all: Vec<Vec<i128>> = rows.into_iter().flatten().collect();
    all.sort();
    all.dedup();
    Ok(all)
}

/// Integer y with y^2 + P y = Q at (x1, x2); y is integral whenever it is rational.
fn deg2_fibre(pc: &[i128], qc: &[i128], x1: i128, x2: i128) -> Vec<i128> {
    let (pv, f) = match (binary(pc, x1, x2), binary(qc, x1, x2)) {
        (Some(pv), Some(qv)) => (BigInt::from(pv), BigInt::from(pv) * pv + BigInt::from(qv) * 4),
        _ => {
            let pv = binary_big(pc, x1, x2);
            let f = &pv * &pv + binary_big(qc, x1, x2) * 4;
            (pv, f)
        }
    };
    if f < BigInt::zero() {
        return Vec::new();
    }
    let Some(s) = exact_sqrt(&f) else { return Vec::new() };
    let roots: [BigInt; 2] = [(-&pv + &s) / 2, (-&pv - &s) / 2];
    let mut ys: Vec<i128> = roots.iter().filter_map(|y| y.to_i128()).collect();
    ys.dedup();
    ys
}

// ---------------------------------------------------------------------------
// Degree 3

/// Coefficients of U(x, y, z) in z, constant term first.
fn cubic_in_z(u: &[i128], x: i128, y: i128) -> [i128; 4] {
    let [a, b, c, f, g, hh, i, j, k, m] = [u[0], u[1], u[2], u[3], u[4], u[5], u[6], u[7], u[8], u[9]];
    [
        a * x * x * x + b * y * y * y + hh * x * x * y + k * x * y * y,
        f * y * y + j * x * x + m * x * y,
        g * x + i * y,
        c,
    ]
}

fn eval_z(co: &[i128; 4], z: i128) -> i128 {
    ((co[3] * z + co[2]) * z + co[1]) * z + co[0]
}

fn eval_zf(co: &[f64; 4], z: f64) -> f64 {
    ((co[3] * z + co[2]) * z + co[1]) * z + co[0]
}

/// Integer roots z with |z| <= h of a polynomial of degree at most 3 that is not identically zero.
fn integer_roots(co: &[i128; 4], h: i128) -> Vec<i128> {
    let cf: [f64; 4] = [co[0] as f64, co[1] as f64, co[2] as f64, co[3] as f64];
    let mut cuts = vec![-(h as f64) - 1.0, h as f64 + 1.0];
    let (qa, qb, qc) = (3.0 * cf[3], 2.0 * cf[2], cf[1]);
    if qa != 0.0 {
        let d = qb * qb - 4.0 * qa * qc;
        if d >= 0.0 {
            cuts.push((-qb + d.sqrt()) / (2.0 * qa));
            cuts.push((-qb - d.sqrt()) / (2.0 * qa));
        }
    } else if qb != 0.0 {
        cuts.push(-qc / qb);
    }
    cuts.retain(|t| t.is_finite() && t.abs() <= h as f64 + 1.0);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut cand: Vec<f64> = cuts.clone();
    for w in cuts.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (eval_zf(&cf, lo), eval_zf(&cf, hi));
        if flo == 0.0 || fhi == 0.0 || flo.signum() == fhi.signum() {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if eval_zf(&cf, mid).signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 0.25 {
                break;
            }
        }
        cand.push(0.5 * (lo + hi));
    }
    let mut out = BTreeSet::new();
    for t in cand {
        let r = t.round() as i128;
        for z in r - 1..=r + 1 {
            if z.abs() <= h && eval_z(co, z) == 0 {
                out.insert(z);
            }
        }
    }
    out.into_iter().collect()
}

fn search_deg3(u: &[i128], h: i128) -> Result<Vec<Vec<i128>>> {
    if (h as u128 + 1) * (2 * h as u128 + 1) > MAX_PAIRS || h > 1 << 20 {
        return Err(Error::Budget(format!("degree 3 search to {h} exceeds the enumeration budget")));
    }
    let sv = sieves(|x, y, z, p| eval_z(&cubic_in_z(u, x, y), z).rem_euclid(p) == 0);
    let rows: Vec<Vec<Vec<i128>>> = (0..=h)
        .into_par_iter()
        .map(|x| {
            let mut out = Vec::new();
            let range: Vec<i128> = if x == 0 { (0..=h).collect() } else { (-h..=h).collect() };
            for y in range {
                if x == 0 && y == 0 {
                    if u[2] == 0 {
                        out.push(vec![0, 0, 1]);
                    }
                    continue;
                }
                if !passes(&sv, x, y) {
                    continue;
                }
                let co = cubic_in_z(u, x, y);
                if co.iter().all(|&c| c == 0) {
                    for z in -h..=h {
                        if gcd(gcd(x, y), z) == 1 {
                            out.push(vec![x, y, z]);
                        }
                    }
                    continue;
                }
                for z in integer_roots(&co, h) {
                    if gcd(gcd(x, y), z) == 1 {
                        out.push(vec![x, y, z]);
                    }
                }
            }
            out
        })
        .collect();
    let mut all: Vec<Vec<i128>> = rows.into_iter().flatten().map(|v| canonical(v, 3)).collect();
    all.sort();
    all.dedup();
    Ok(all)
}

// ---------------------------------------------------------------------------
// Degree 4

struct Quadrics {
    q: [[[i128; 4]; 4]; 2],
}

impl Quadrics {
    fn new(c: &[i128]) -> Self {
        let mut q = [[[0i128; 4]; 4]; 2];
        for (f, qf) in q.iter_mut().enumerate() {
            for (idx, &(i, j)) in QUAD_PAIRS.iter().enumerate() {
                qf[i][j] = c[10 * f + idx];
            }
        }
        Quadrics { q }
    }

    fn eval(&self, f: usize, x: &[i128; 4]) -> i128 {
        let mut s = 0;
        for i in 0..4 {
            for j in i..4 {
                s += self.q[f][i][j] * x[i] * x[j];
            }
        }
        s
    }

    fn eval_mod(&self, f: usize, x: &[i128; 4], m: i128) -> i128 {
        let mut s = 0;
        for i in 0..4 {
            for j in i..4 {
                s = (s + self.q[f][i][j].rem_euclid(m) * (x[i] * x[j] % m)) % m;
            }
        }
        s
    }

    fn grad_mod(&self, f: usize, x: &[i128; 4], m: i128) -> [i128; 4] {
        let mut g = [0i128; 4];
        for i in 0..4 {
            for j in i..4 {
                let c = self.q[f][i][j].rem_euclid(m);
                g[i] = (g[i] + c * x[j]) % m;
                g[j] = (g[j] + c * x[i]) % m;
            }
        }
        g
    }
}

fn inv_mod(a: i128, m: i128) -> i128 {
    let e = a.rem_euclid(m).extended_gcd(&m);
    e.x.rem_euclid(m)
}

/// Determinant of a 3x3 integer matrix.
fn det3(m: [[i128; 3]; 3]) -> i128 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// The vector orthogonal to three vectors of Z^4 given by signed 3x3 minors, reduced mod m.
fn cross3(a: &[i128; 4], b: &[i128; 4], c: &[i128; 4], m: i128) -> [i128; 4] {
    let mut out = [0i128; 4];
    for (i, o) in out.iter_mut().enumerate() {
        let cols: Vec<usize> = (0..4).filter(|&j| j != i).collect();
        let mat = [
            [a[cols[0]], a[cols[1]], a[cols[2]]],
            [b[cols[0]], b[cols[1]], b[cols[2]]],
            [c[cols[0]], c[cols[1]], c[cols[2]]],
        ];
        let d = det3(mat).rem_euclid(m);
        *o = if i % 2 == 0 { d } else { (m - d) % m };
    }
    out
}

fn search_deg4(model: &GenusOneModel, c: &[i128], h: i128) -> Result<Vec<Vec<i128>>> {
    let qs = Quadrics::new(c);
    let disc = invariants(model).disc.to_integer();
    let target = (8.0f64).ln() + 4.0 * ((2 * h) as f64).ln();
    let level = |p: u64| ((target / (5.0 * (p as f64).ln())).ceil() as u32).max(1);
    // The class count is about p^j; pick the good prime below 60 minimizing it.
    let (p, j) = (3u64..60)
        .filter(|&p| is_prime_u64(p) && !(&disc % p).is_zero())
        .map(|p| (p, level(p)))
        .min_by(|a, b| (a.1 as f64 * (a.0 as f64).ln()).total_cmp(&(b.1 as f64 * (b.0 as f64).ln())))
        .ok_or_else(|| Error::Domain("no prime of good reduction below 60".into()))?;
    let pj = (p as i128).pow(j);
    let m2 = pj * pj;
    if (p as u128).pow(j) * (p as u128 + 1) > MAX_CLASSES || m2 > 1i128 << 60 {
        return Err(Error::Budget(format!("degree 4 search to {h} exceeds the class budget")));
    }
    let red = reduce_model(model, p)?;
    let roots = projective_solutions(&red.forms, 4, p)?;
    let mut classes: Vec<[i128; 4]> = Vec::new();
    for r in roots {
        let start = [r[0] as i128, r[1] as i128, r[2] as i128, r[3] as i128];
        let mut level = vec![start];
        for m in 1..j {
            let mut next = Vec::with_capacity(level.len() * p as usize);
            for pt in &level {
                next.extend(lift_step(&qs, pt, p, m, true));
            }
            level = next;
        }
        classes.extend(level);
    }
    let found: Vec<Vec<[i128; 4]>> = classes
        .par_iter()
        .map(|cls| {
            let mut pt = *cls;
            for m in j..2 * j {
                pt = lift_step(&qs, &pt, p, m, false).pop().expect("smooth points lift");
            }
            class_points(&qs, &pt, p, pj, h)
        })
        .collect();
    let mut all: Vec<Vec<i128>> = found.into_iter().flatten().map(|v| canonical(v.to_vec(), 4)).collect();
    all.sort();
    all.dedup();
    Ok(all)
}

/// Lifts a point with Q_i(P) = 0 mod p^m to points mod p^(m+1): all p classes, or the first one.
fn lift_step(qs: &Quadrics, pt: &[i128; 4], p: u64, m: u32, all: bool) -> Vec<[i128; 4]> {
    let pm = (p as i128).pow(m);
    let pm1 = pm * p as i128;
    let pi = p as i128;
    let rows: Vec<Vec<u64>> = (0..2).map(|f| qs.grad_mod(f, pt, pi).iter().map(|&v| v as u64).collect()).collect();
    let rhs: Vec<u64> = (0..2).map(|f| ((pi - (qs.eval_mod(f, pt, pm1) / pm) % pi) % pi) as u64).collect();
    let v0 = solve_linear(&rows, &rhs, p).expect("gradients of a smooth point are independent");
    let pmod: Vec<u64> = pt.iter().map(|&v| v.rem_euclid(pi) as u64).collect();
    let tangent = kernel(&rows, 4, p)
        .into_iter()
        .find(|k| rank(&[k.clone(), pmod.clone()], p) == 2)
        .expect("the tangent line is two-dimensional");
    let count = if all { p } else { 1 };
    (0..count)
        .map(|a| {
            let mut q = *pt;
            for i in 0..4 {
                let d = (v0[i] as i128 + a as i128 * tangent[i] as i128) % pi;
                q[i] = (q[i] + pm * d).rem_euclid(pm1);
            }
            q
        })
        .collect()
}

/// Curve points of height at most h in the class of P0 (given mod p^(2j)).
fn class_points(qs: &Quadrics, p0: &[i128; 4], p: u64, pj: i128, h: i128) -> Vec<[i128; 4]> {
    let m2 = pj * pj;
    let pi = p as i128;
    let k = (0..4).find(|&i| p0[i] % pi != 0).expect("projective point");
    let s = inv_mod(p0[k], m2);
    let b1: [i128; 4] = std::array::from_fn(|i| p0[i] * s % m2);
    let g1 = qs.grad_mod(0, &b1, m2);
    let g2 = qs.grad_mod(1, &b1, m2);
    let mut ek = [0i128; 4];
    ek[k] = 1;
    let x = cross3(&g1, &g2, &ek, pj);
    let Some(l) = (0..4).find(|&i| x[i] % pi != 0) else { return Vec::new() };
    let t = inv_mod(x[l], pj);
    let xn: [i128; 4] = std::array::from_fn(|i| x[i] * t % pj);
    let rest: Vec<usize> = (0..4).filter(|&i| i != k && i != l).collect();
    let center = |v: i128| if v > m2 / 2 { v - m2 } else { v };
    let mut basis = [[0i128; 4]; 4];
    basis[0] = std::array::from_fn(|i| center(b1[i]));
    basis[1] = std::array::from_fn(|i| center(xn[i] * pj % m2));
    basis[2][rest[0]] = m2;
    basis[3][rest[1]] = m2;
    lll(&mut basis);
    let mut out = Vec::new();
    short_vectors(&basis, (2 * h) as f64, |v| {
        if v.iter().all(|c| c.abs() <= h)
            && v.iter().any(|&c| c != 0)
            && v.iter().fold(0, |g, &c| gcd(g, c)) == 1
            && qs.eval(0, v) == 0
            && qs.eval(1, v) == 0
        {
            out.push(*v);
        }
    });
    out
}

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn to_f(v: &[i128; 4]) -> [f64; 4] {
    std::array::from_fn(|i| v[i] as f64)
}

/// Gram-Schmidt data: coefficients mu and squared norms of the orthogonalized rows.
fn gram_schmidt(b: &[[i128; 4]; 4]) -> ([[f64; 4]; 4], [f64; 4]) {
    let mut star = [[0f64; 4]; 4];
    let mut mu = [[0f64; 4]; 4];
    let mut nrm = [0f64; 4];
    for i in 0..4 {
        let bi = to_f(&b[i]);
        let mut v = bi;
        for jj in 0..i {
            mu[i][jj] = dot(&bi, &star[jj]) / nrm[jj];
            for t in 0..4 {
                v[t] -= mu[i][jj] * star[jj][t];
            }
        }
        star[i] = v;
        nrm[i] = dot(&v, &v);
    }
    (mu, nrm)
}

/// LLL reduction with parameter 0.99.
fn lll(b: &mut [[i128; 4]; 4]) {
    let mut k = 1;
    let mut guard = 0;
    while k < 4 && guard < 10_000 {
        guard += 1;
        for jj in (0..k).rev() {
            let (mu, _) = gram_schmidt(b);
            let r = mu[k][jj].round() as i128;
            if r != 0 {
                for t in 0..4 {
                    b[k][t] -= r * b[jj][t];
                }
            }
        }
        let (mu, nrm) = gram_schmidt(b);
        if nrm[k] >= (0.99 - mu[k][k - 1] * mu[k][k - 1]) * nrm[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
}

/// Calls `visit` on every lattice vector of Euclidean norm at most `radius` (both signs).
fn short_vectors(b: &[[i128; 4]; 4], radius: f64, mut visit: impl FnMut(&[i128; 4])) {
    let (mu, nrm) = gram_schmidt(b);
    let bound = radius * radius * (1.0 + 1e-9) + 1.0;
    let mut coef = [0i128; 4];
    fn rec(
        i: usize,
        rem: f64,
        coef: &mut [i128; 4],
        mu: &[[f64; 4]; 4],
        nrm: &[f64; 4],
        b: &[[i128; 4]; 4],
        visit: &mut dyn FnMut(&[i128; 4]),
    ) {
        let c: f64 = -(i + 1..4).map(|k| mu[k][i] * coef[k] as f64).sum::<f64>();
        let w = (rem / nrm[i]).max(0.0).sqrt();
        let lo = (c - w).ceil() as i128;
        let hi = (c + w).floor() as i128;
        for x in lo..=hi {
            coef[i] = x;
            let d = x as f64 - c;
            let r = rem - d * d * nrm[i];
            if r < 0.0 {
                continue;
            }
            if i == 0 {
                let v: [i128; 4] = std::array::from_fn(|t| (0..4).map(|k| coef[k] * b[k][t]).sum());
                visit(&v);
            } else {
                rec(i - 1, r, coef, mu, nrm, b, visit);
            }
        }
        coef[i] = 0;
    }
    rec(3, bound, &mut coef, &mu, &nrm, b, &mut visit);
}
