//! Reduction of genus one models modulo p: finite-field points, smoothness, the component through
//! each smooth point, non-regular points and the classification of singular reductions.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactmath::rational::{check_prime, mod_u64, pow_mod_u64, rat, val_rat, Valuation};
use crate::exactmath::{Fq, Mono, QPoly, Rational, UPoly};
use crate::models::GenusOneModel;

mod classify;
pub use classify::{classify, divide_form_by_linear, rational_components, GeomComponent, RationalComponents, ReductionReport};

/// Largest prime for which the point sweeps are attempted.
pub const MAX_SWEEP_PRIME: u64 = 3_000_000;
/// Primes up to this bound are handled by plain enumeration instead of resultants.
const SMALL_PRIME: u64 = 64;
/// Largest number of points a positive-dimensional piece may contribute.
const MAX_POINTS: u64 = 20_000_000;

#[inline]
pub fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn addm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

#[inline]
pub fn subm(a: u64, b: u64, p: u64) -> u64 {
    addm(a, p - b % p, p)
}

pub fn invm(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "inverse of zero mod {p}");
    pow_mod_u64(a % p, p - 2, p)
}

/// Reduction of a p-integral rational; None when p divides the denominator.
pub fn rat_mod(q: &Rational, p: u64) -> Option<u64> {
    let d = mod_u64(q.denom(), p);
    if d == 0 {
        return None;
    }
    Some(mulm(mod_u64(q.numer(), p), invm(d, p), p))
}

pub fn lift(v: &[u64]) -> Vec<Rational> {
    v.iter().map(|&a| rat(a as i64, 1)).collect()
}

/// Scales a nonzero vector so that its first nonzero entry is 1.
pub fn normalize(v: &[u64], p: u64) -> Vec<u64> {
    match v.iter().find(|&&a| a != 0) {
        Some(&a) => {
            let i = invm(a, p);
            v.iter().map(|&b| mulm(b, i, p)).collect()
        }
        None => v.to_vec(),
    }
}

/// Scales a nonzero vector so that its last nonzero entry is 1.
pub fn normalize_last(v: &[u64], p: u64) -> Vec<u64> {
    match v.iter().rev().find(|&&a| a != 0) {
        Some(&a) => {
            let i = invm(a, p);
            v.iter().map(|&b| mulm(b, i, p)).collect()
        }
        None => v.to_vec(),
    }
}

// ---------------------------------------------------------------------------
// Linear algebra over F_p

/// Reduced row echelon form; returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[Vec<u64>], p: u64) -> (Vec<Vec<u64>>, Vec<usize>) {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&a| a % p).collect()).collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(k) = (r..m.len()).find(|&k| m[k][c] != 0) else { continue };
        m.swap(r, k);
        let inv = invm(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = mulm(*x, inv, p);
        }
        for k in 0..m.len() {
            if k != r && m[k][c] != 0 {
                let f = m[k][c];
                for j in 0..ncols {
                    let t = mulm(f, m[r][j], p);
                    m[k][j] = subm(m[k][j], t, p);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vec<u64>], p: u64) -> usize {
    rref(rows, p).0.len()
}

/// Basis of the right null space {x : rows·x = 0}.
pub fn kernel(rows: &[Vec<u64>], ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let (m, pivots) = rref(rows, p);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; ncols];
            v[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[r][f]) % p;
            }
            v
        })
        .collect()
}

/// Extends independent vectors by standard basis vectors to a basis of F_p^n.
pub fn complete_basis(vs: &[Vec<u64>], n: usize, p: u64) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = vs.to_vec();
    for i in 0..n {
        if out.len() == n {
            break;
        }
        let mut e = vec![0u64; n];
        e[i] = 1;
        let mut trial = out.clone();
        trial.push(e);
        if rank(&trial, p) == trial.len() {
            out = trial;
        }
    }
    out
}

/// Solves A x = b over F_p (A given by rows); returns one solution if consistent.
pub fn solve_linear(a: &[Vec<u64>], b: &[u64], p: u64) -> Option<Vec<u64>> {
    let n = a.first().map_or(0, |r| r.len());
    let aug: Vec<Vec<u64>> = a.iter().zip(b).map(|(r, &c)| r.iter().cloned().chain([c % p]).collect()).collect();
    let (m, pivots) = rref(&aug, p);
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![0u64; n];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = m[r][n];
    }
    Some(x)
}

// ---------------------------------------------------------------------------
// Polynomials over F_p

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    pub nvars: usize,
    pub terms: Vec<(Mono, u64)>,
}

impl FpPoly {
    pub fn zero(nvars: usize) -> Self {
        FpPoly { nvars, terms: vec![] }
    }

    fn from_map(nvars: usize, map: BTreeMap<Mono, u64>) -> Self {
        FpPoly { nvars, terms: map.into_iter().filter(|(_, c)| *c != 0).collect() }
    }

    pub fn from_terms(nvars: usize, terms: &[(Mono, u64)], p: u64) -> Self {
        let mut map = BTreeMap::new();
        for &(m, c) in terms {
            let e = map.entry(m).or_insert(0);
            *e = addm(*e, c % p, p);
        }
        Self::from_map(nvars, map)
    }

    pub fn from_qpoly(f: &QPoly, p: u64) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (m, c) in f.terms() {
            let r = rat_mod(c, p).ok_or_else(|| Error::Input(format!("coefficient {c} is not {p}-integral")))?;
            map.insert(*m, r);
        }
        Ok(Self::from_map(f.nvars(), map))
    }

    pub fn to_qpoly(&self) -> QPoly {
        QPoly::from_terms(self.nvars, self.terms.iter().map(|&(m, c)| (m, rat(c as i64, 1))))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Mono) -> u64 {
        self.terms.iter().find(|(mm, _)| mm == m).map_or(0, |t| t.1)
    }

    pub fn eval(&self, x: &[u64], p: u64) -> u64 {
        let mut acc = 0;
        for (m, c) in &self.terms {
            let mut t = *c;
            for i in 0..self.nvars {
                for _ in 0..m[i] {
                    t = mulm(t, x[i], p);
                }
            }
            acc = addm(acc, t, p);
        }
        acc
    }

    pub fn partial(&self, i: usize, p: u64) -> Self {
        let mut map = BTreeMap::new();
        for (m, c) in &self.terms {
            if m[i] > 0 {
                let mut mm = *m;
                mm[i] -= 1;
                let e = map.entry(mm).or_insert(0);
                *e = addm(*e, mulm(*c, m[i] as u64, p), p);
            }
        }
        Self::from_map(self.nvars, map)
    }

    pub fn add(&self, o: &FpPoly, p: u64) -> Self {
        let mut map: BTreeMap<Mono, u64> = self.terms.iter().cloned().collect();
        for (m, c) in &o.terms {
            let e = map.entry(*m).or_insert(0);
            *e = addm(*e, *c, p);
        }
        Self::from_map(self.nvars.max(o.nvars), map)
    }

    pub fn scale(&self, c: u64, p: u64) -> Self {
        Self::from_map(self.nvars, self.terms.iter().map(|(m, a)| (*m, mulm(*a, c, p))).collect())
    }

    pub fn sub(&self, o: &FpPoly, p: u64) -> Self {
        self.add(&o.scale(p - 1, p), p)
    }

    pub fn mul(&self, o: &FpPoly, p: u64) -> Self {
        let mut map = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m = [m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2], m1[3] + m2[3]];
                let e = map.entry(m).or_insert(0);
                *e = addm(*e, mulm(*c1, *c2, p), p);
            }
        }
        Self::from_map(self.nvars.max(o.nvars), map)
    }

    /// Fixes the variables given as Some; the remaining variables are renumbered in order.
    pub fn specialize(&self, vals: &[Option<u64>], p: u64) -> Self {
        let free: Vec<usize> = (0..self.nvars).filter(|&i| vals[i].is_none()).collect();
        let mut map = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut t = *c;
            let mut mm = [0u8; 4];
            for i in 0..self.nvars {
                match vals[i] {
                    Some(v) => {
                        for _ in 0..m[i] {
                            t = mulm(t, v, p);
                        }
                    }
                    None => {
                        let j = free.iter().position(|&f| f == i).unwrap();
                        mm[j] = m[i];
                    }
                }
            }
            if t != 0 {
                let e = map.entry(mm).or_insert(0);
                *e = addm(*e, t, p);
            }
        }
        Self::from_map(free.len(), map)
    }

    /// Dense univariate form in variable 0.
    pub fn to_upoly(&self) -> UPoly {
        let d = self.terms.iter().map(|(m, _)| m[0] as usize).max().unwrap_or(0);
        let mut out = vec![[0u64, 0u64]; d + 1];
        for (m, c) in &self.terms {
            out[m[0] as usize] = [*c, 0];
        }
        while out.last().map_or(false, |c| c[0] == 0) {
            out.pop();
        }
        out
    }

    /// Substitutes x_i = sum_j cols[j][i] t_j, giving a polynomial in cols.len() variables.
    pub fn compose_linear(&self, cols: &[Vec<u64>], p: u64) -> Self {
        let k = cols.len();
        let lin: Vec<FpPoly> = (0..self.nvars)
            .map(|i| {
                let terms: Vec<(Mono, u64)> = (0..k)
                    .map(|j| {
                        let mut m = [0u8; 4];
                        m[j] = 1;
                        (m, cols[j][i])
                    })
                    .collect();
                FpPoly::from_terms(k, &terms, p)
            })
            .collect();
        let mut out = FpPoly::zero(k);
        for (m, c) in &self.terms {
            let mut t = FpPoly::from_terms(k, &[([0; 4], *c)], p);
            for i in 0..self.nvars {
                for _ in 0..m[i] {
                    t = t.mul(&lin[i], p);
                }
            }
            out = out.add(&t, p);
        }
        out.nvars = k;
        out
    }

    /// Coefficient polynomials (in variable 0) of powers of variable 1, for bivariate input.
    fn coeffs_in_var1(&self) -> Vec<UPoly> {
        let d = self.terms.iter().map(|(m, _)| m[1] as usize).max().unwrap_or(0);
        let mut out: Vec<UPoly> = vec![vec![]; d + 1];
        for (m, c) in &self.terms {
            let v = &mut out[m[1] as usize];
            let e = m[0] as usize;
            if v.len() <= e {
                v.resize(e + 1, [0, 0]);
            }
            v[e] = [*c, 0];
        }
        for v in out.iter_mut() {
            while v.last().map_or(false, |c| c[0] == 0) {
                v.pop();
            }
        }
        while out.len() > 1 && out.last().map_or(false, |v| v.is_empty()) {
            out.pop();
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Solving polynomial systems over F_p

fn all_points(m: usize, p: u64) -> Result<Vec<Vec<u64>>> {
    let total = (p as u128).pow(m as u32);
    if total > MAX_POINTS as u128 {
        return Err(Error::Budget(format!("solution set has {total} points")));
    }
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out.into_iter().flat_map(|v: Vec<u64>| (0..p).map(move |a| [v.clone(), vec![a]].concat())).collect();
    }
    Ok(out)
}

fn det_upoly(k: &Fq, m: &[Vec<UPoly>]) -> UPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc: UPoly = vec![];
    for j in 0..n {
        if m[0][j].is_empty() {
            continue;
        }
        let minor: Vec<Vec<UPoly>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, e)| e.clone()).collect()).collect();
        let t = k.pmul(&m[0][j], &det_upoly(k, &minor));
        acc = if j % 2 == 0 { k.padd(&acc, &t) } else { k.psub(&acc, &t) };
    }
    acc
}

/// Resultant in variable 1 of two bivariate polynomials, as a polynomial in variable 0.
fn resultant_var1(k: &Fq, f: &FpPoly, g: &FpPoly) -> Option<UPoly> {
    let a = f.coeffs_in_var1();
    let b = g.coeffs_in_var1();
    let (da, db) = (a.len() - 1, b.len() - 1);
    if da == 0 && db == 0 {
        return None;
    }
    if da == 0 {
        return Some(a[0].clone());
    }
    if db == 0 {
        return Some(b[0].clone());
    }
    let n = da + db;
    let mut m: Vec<Vec<UPoly>> = vec![vec![vec![]; n]; n];
    for i in 0..db {
        for (j, c) in a.iter().rev().enumerate() {
            m[i][i + j] = c.clone();
        }
    }
    for i in 0..da {
        for (j, c) in b.iter().rev().enumerate() {
            m[db + i][i + j] = c.clone();
        }
    }
    Some(det_upoly(k, &m))
}

/// All common zeros in F_p^m of polynomials in m variables.
pub fn affine_solutions(polys: &[FpPoly], m: usize, p: u64) -> Result<Vec<Vec<u64>>> {
    if p > MAX_SWEEP_PRIME {
        return Err(Error::Budget(format!("point enumeration over F_{p} exceeds the sweep limit {MAX_SWEEP_PRIME}")));
    }
    let k = Fq::fp(p);
    solve_rec(polys, m, p, &k)
}

fn solve_rec(polys: &[FpPoly], m: usize, p: u64, k: &Fq) -> Result<Vec<Vec<u64>>> {
    let nz: Vec<FpPoly> = polys.iter().filter(|f| !f.is_zero()).cloned().collect();
    if nz.is_empty() {
        return all_points(m, p);
    }
    if m == 0 {
        return Ok(vec![]);
    }
    if m == 1 {
        let mut g: UPoly = vec![];
        for f in &nz {
            g = k.pgcd(&g, &f.to_upoly());
        }
        if g.len() <= 1 {
            return Ok(vec![]);
        }
        return Ok(k.roots(&g).into_iter().map(|r| vec![r[0]]).collect());
    }
    if m == 2 && p > SMALL_PRIME && nz.len() >= 2 {
        if let Some(r) = resultant_var1(k, &nz[0], &nz[1]) {
            if !r.is_empty() {
                let mut out = Vec::new();
                if r.len() == 1 {
                    return Ok(out);
                }
                for y0 in k.roots(&r) {
                    let sub: Vec<FpPoly> = nz.iter().map(|f| f.specialize(&[Some(y0[0]), None], p)).collect();
                    for s in solve_rec(&sub, 1, p, k)? {
                        out.push(vec![y0[0], s[0]]);
                    }
                }
                return Ok(out);
            }
        }
    }
    let mut out = Vec::new();
    for a in 0..p {
        let mut vals = vec![None; m];
        vals[0] = Some(a);
        let sub: Vec<FpPoly> = nz.iter().map(|f| f.specialize(&vals, p)).collect();
        for s in solve_rec(&sub, m - 1, p, k)? {
            let mut v = Vec::with_capacity(m);
            v.push(a);
            v.extend(s);
            out.push(v);
        }
        if out.len() as u64 > MAX_POINTS {
            return Err(Error::Budget("too many solutions".into()));
        }
    }
    Ok(out)
}

/// Common zeros in P^{n-1}(F_p) of forms in n variables, each normalized with last nonzero entry 1.
pub fn projective_solutions(forms: &[FpPoly], n: usize, p: u64) -> Result<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    for i in (0..n).rev() {
        let vals: Vec<Option<u64>> = (0..n).map(|j| if j < i { None } else if j == i { Some(1) } else { Some(0) }).collect();
        let sub: Vec<FpPoly> = forms.iter().map(|f| f.specialize(&vals, p)).collect();
        for s in affine_solutions(&sub, i, p)? {
            let mut v = s;
            v.push(1);
            v.resize(n, 0);
            out.push(v);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Reduced models

/// Which points of the reduction are considered: all of it, or the piece where the last
/// x-coordinate is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Chart {
    Full,
    Affine,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedModel {
    pub degree: usize,
    pub p: u64,
    /// (P, Q) for degree 2, (U) for degree 3, (Q1, Q2) for degree 4.
    pub forms: Vec<FpPoly>,
}

pub fn reduce_forms(degree: usize, forms: &[QPoly], p: u64) -> Result<ReducedModel> {
    let forms = forms.iter().map(|f| FpPoly::from_qpoly(f, p)).collect::<Result<Vec<_>>>()?;
    Ok(ReducedModel { degree, p, forms })
}

/// Coefficientwise reduction of a p-integral model.
pub fn reduce_model(model: &GenusOneModel, p: u64) -> Result<ReducedModel> {
    check_prime(p)?;
    reduce_forms(model.degree(), &model.forms(), p)
}

/// A component of the reduction through a smooth k-point.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Component {
    /// A component of degree n-1 or n (for degree 2: the whole curve when it does not split).
    Main,
    /// Degree 2: the curve y = r_i(x1, x2) when the reduction splits into two k-rational curves.
    Section(usize),
    /// Degree 3: a line, given by its linear form with first nonzero coefficient 1.
    PlaneLine(Vec<u64>),
    /// Degree 4: a line, given by a reduced row echelon basis of its 2-dimensional span.
    SpaceLine(Vec<Vec<u64>>),
    /// Degree 4: a conic, given by the linear form of its plane.
    Conic(Vec<u64>),
}

/// How the reduction y^2 + P y = Q of a degree-2 model decomposes over k.
#[derive(Clone, Debug, PartialEq)]
pub enum Deg2Split {
    /// No k-rational splitting into two distinct curves.
    Irreducible,
    /// Two distinct k-rational curves y = r_0, y = r_1 with r_i binary quadratic forms.
    Rational([FpPoly; 2]),
    /// Two curves conjugate over a quadratic extension; every k-point lies on both.
    Conjugate,
    /// A double curve; no point is smooth.
    Double,
}

#[derive(Clone, Debug, Default)]
pub struct Survey {
    pub smooth: Vec<(Vec<u64>, Component)>,
    pub singular: Vec<Vec<u64>>,
}

impl Survey {
    pub fn components(&self) -> BTreeSet<Component> {
        self.smooth.iter().map(|(_, c)| c.clone()).collect()
    }
}

impl ReducedModel {
    /// Whether the reduced equations vanish identically; never true in degree 2, where y^2 survives.
    pub fn is_zero(&self) -> bool {
        self.degree != 2 && self.forms.iter().all(|f| f.is_zero())
    }

    /// The defining equations: y^2 + P y - Q in (x1, x2, y) for degree 2, else the forms.
    pub fn equations(&self) -> Vec<FpPoly> {
        let p = self.p;
        if self.degree == 2 {
            let mut terms: Vec<(Mono, u64)> = vec![([0, 0, 2, 0], 1)];
            for (m, c) in &self.forms[0].terms {
                terms.push(([m[0], m[1], 1, 0], *c));
            }
            for (m, c) in &self.forms[1].terms {
                terms.push(([m[0], m[1], 0, 0], (p - c) % p));
            }
            vec![FpPoly::from_terms(3, &terms, p)]
        } else {
            self.forms.clone()
        }
    }

    /// Lifts the coefficients to integers in [0, p) as a genus one model.
    pub fn lift_model(&self) -> Result<GenusOneModel> {
        let forms: Vec<QPoly> = self.forms.iter().map(|f| f.to_qpoly()).collect();
        GenusOneModel::from_forms(self.degree, &forms)
    }

    /// Whether the reduction is nonsingular, i.e. the discriminant is nonzero mod p.
    pub fn is_nonsingular(&self) -> Result<bool> {
        let d = self.lift_model()?.invariants().disc;
        Ok(rat_mod(&d, self.p).map_or(false, |r| r != 0))
    }

    /// k-points of the reduction on the chart (degree 2 points are (x1, x2, y)).
    pub fn points(&self, chart: Chart) -> Result<Vec<Vec<u64>>> {
        let p = self.p;
        let eqs = self.equations();
        match self.degree {
            2 => {
                let mut out = Vec::new();
                let aff: Vec<FpPoly> = eqs.iter().map(|f| f.specialize(&[None, Some(1), None], p)).collect();
                for s in affine_solutions(&aff, 2, p)? {
                    out.push(vec![s[0], 1, s[1]]);
                }
                if chart == Chart::Full {
                    let inf: Vec<FpPoly> = eqs.iter().map(|f| f.specialize(&[Some(1), Some(0), None], p)).collect();
                    for s in affine_solutions(&inf, 1, p)? {
                        out.push(vec![1, 0, s[0]]);
                    }
                }
                Ok(out)
            }
            n => match chart {
                Chart::Full => projective_solutions(&eqs, n, p),
                Chart::Affine => {
                    let vals: Vec<Option<u64>> = (0..n).map(|j| if j == n - 1 { Some(1) } else { None }).collect();
                    let sub: Vec<FpPoly> = eqs.iter().map(|f| f.specialize(&vals, p)).collect();
                    Ok(affine_solutions(&sub, n - 1, p)?
                        .into_iter()
                        .map(|mut v| {
                            v.push(1);
                            v
                        })
                        .collect())
                }
            },
        }
    }

    /// Gradients of the defining equations at a point.
    pub fn gradients(&self, pt: &[u64]) -> Vec<Vec<u64>> {
        let p = self.p;
        self.equations()
            .iter()
            .map(|f| (0..f.nvars).map(|i| f.partial(i, p).eval(pt, p)).collect())
            .collect()
    }

    pub fn is_smooth_at(&self, pt: &[u64]) -> bool {
        let g = self.gradients(pt);
        match self.degree {
            4 => rank(&g, self.p) == 2,
            _ => g[0].iter().any(|&a| a != 0),
        }
    }

    /// The decomposition of a degree-2 reduction into k-rational curves.
    pub fn deg2_split(&self) -> Deg2Split {
        let p = self.p;
        let (pp, qq) = (&self.forms[0], &self.forms[1]);
        if p == 2 {
            for bits in 0..8u64 {
                let r = FpPoly::from_terms(2, &[([2, 0, 0, 0], bits & 1), ([1, 1, 0, 0], (bits >> 1) & 1), ([0, 2, 0, 0], (bits >> 2) & 1)], p);
                if r.mul(&r, p).add(&pp.mul(&r, p), p).sub(qq, p).is_zero() {
                    let s = pp.add(&r, p);
                    return if s == r { Deg2Split::Double } else { Deg2Split::Rational([r, s]) };
                }
            }
            return Deg2Split::Irreducible;
        }
        let k = Fq::fp(p);
        let f = pp.mul(pp, p).add(&qq.scale(4, p), p);
        if f.is_zero() {
            return Deg2Split::Double;
        }
        let Some(g) = square_root_binary(&k, &f, 4) else { return Deg2Split::Irreducible };
        let (gform, alpha) = g;
        match k.sqrt([alpha, 0]) {
            Some(s) => {
                let half = invm(2, p);
                let sg = gform.scale(s[0], p);
                let minus_p = pp.scale(p - 1, p);
                let r0 = minus_p.add(&sg, p).scale(half, p);
                let r1 = minus_p.sub(&sg, p).scale(half, p);
                Deg2Split::Rational([r0, r1])
            }
            None => Deg2Split::Conjugate,
        }
    }

    /// The component through a smooth k-point.
    pub fn component_at(&self, pt: &[u64], split: &Deg2Split) -> Component {
        let p = self.p;
        match self.degree {
            2 => {
                if let Deg2Split::Rational(rs) = split {
                    for (i, r) in rs.iter().enumerate() {
                        if r.eval(&pt[..2], p) == pt[2] {
                            return Component::Section(i);
                        }
                    }
                }
                Component::Main
            }
            3 => {
                let l = self.gradients(pt)[0].clone();
                let basis = kernel(&[l.clone()], 3, p);
                if self.forms[0].compose_linear(&basis, p).is_zero() {
                    Component::PlaneLine(normalize(&l, p))
                } else {
                    Component::Main
                }
            }
            _ => self.component_at_deg4(pt),
        }
    }

    fn component_at_deg4(&self, pt: &[u64]) -> Component {
        let p = self.p;
        let grads = self.gradients(pt);
        let ker = kernel(&grads, 4, p);
        let v = ker.iter().find(|k| rank(&[pt.to_vec(), (*k).clone()], p) == 2).unwrap().clone();
        let (q1, q2) = (&self.forms[0], &self.forms[1]);
        let span = vec![pt.to_vec(), v.clone()];
        if q1.compose_linear(&span, p).is_zero() && q2.compose_linear(&span, p).is_zero() {
            return Component::SpaceLine(rref(&span, p).0);
        }
        let (a, b) = (q1.eval(&v, p), q2.eval(&v, p));
        let qt = q1.scale(b, p).sub(&q2.scale(a, p), p);
        let bil = |x: &[u64], y: &[u64]| -> u64 {
            let s: Vec<u64> = x.iter().zip(y).map(|(&u, &w)| addm(u, w, p)).collect();
            subm(subm(qt.eval(&s, p), qt.eval(x, p), p), qt.eval(y, p), p)
        };
        let basis = complete_basis(&span, 4, p);
        let (w1, w2) = (&basis[2], &basis[3]);
        let lin = vec![vec![bil(pt, w1), bil(pt, w2)], vec![bil(&v, w1), bil(&v, w2)]];
        let comb = |a: u64, b: u64| -> Vec<u64> { (0..4).map(|i| addm(mulm(a, w1[i], p), mulm(b, w2[i], p), p)).collect() };
        let mut cands: Vec<(u64, u64)> = Vec::new();
        if rank(&lin, p) == 0 {
            let c20 = qt.eval(w1, p);
            let c02 = qt.eval(w2, p);
            let c11 = subm(subm(qt.eval(&comb(1, 1), p), c20, p), c02, p);
            let k = Fq::fp(p);
            if c20 == 0 {
                cands.push((1, 0));
            }
            let f: UPoly = k.trim(vec![[c02, 0], [c11, 0], [c20, 0]]);
            if f.is_empty() {
                cands.push((0, 1));
            } else {
                for r in k.roots(&f) {
                    cands.push((r[0], 1));
                }
            }
        } else if rank(&lin, p) == 1 {
            let k2 = kernel(&lin, 2, p);
            cands.push((k2[0][0], k2[0][1]));
        }
        for (a, b) in cands {
            let w = comb(a, b);
            if qt.eval(&w, p) == 0 {
                let plane = kernel(&[pt.to_vec(), v.clone(), w], 4, p);
                if plane.len() == 1 {
                    return Component::Conic(normalize(&plane[0], p));
                }
            }
        }
        Component::Main
    }

    /// Smooth k-points on the chart with their components, and the singular k-points.
    pub fn survey(&self, chart: Chart) -> Result<Survey> {
        let split = if self.degree == 2 { self.deg2_split() } else { Deg2Split::Irreducible };
        let mut out = Survey::default();
        for pt in self.points(chart)? {
            if self.is_smooth_at(&pt) {
                let c = self.component_at(&pt, &split);
                out.smooth.push((pt, c));
            } else {
                out.singular.push(pt);
            }
        }
        Ok(out)
    }

    /// Some smooth k-point on the chart, if any.
    pub fn smooth_point(&self, chart: Chart) -> Result<Option<Vec<u64>>> {
        if self.is_zero() {
            return Ok(None);
        }
        for pt in self.points(chart)? {
            if self.is_smooth_at(&pt) {
                return Ok(Some(pt));
            }
        }
        Ok(None)
    }
}

/// Writes a nonzero binary form F of degree d as alpha * G^2 with G monic-in-x when possible.
fn square_root_binary(k: &Fq, f: &FpPoly, d: usize) -> Option<(FpPoly, u64)> {
    let p = k.p;
    let uf = f.specialize(&[None, Some(1)], p).to_upoly();
    let deg = uf.len() - 1;
    let inf = d - deg;
    if inf % 2 == 1 {
        return None;
    }
    let alpha = uf[deg][0];
    let mut g: UPoly = vec![k.one()];
    for (fac, e) in k.factor(&uf) {
        if e % 2 == 1 {
            return None;
        }
        for _ in 0..e / 2 {
            g = k.pmul(&g, &fac);
        }
    }
    let half = d / 2;
    let terms: Vec<(Mono, u64)> = g.iter().enumerate().map(|(j, c)| ([j as u8, (half - j) as u8, 0, 0], c[0])).collect();
    Some((FpPoly::from_terms(2, &terms, p), alpha))
}

/// Whether a smooth k-point exists on the chart of the reduction.
pub fn has_smooth_kpoint(reduced: &ReducedModel, chart: Chart) -> Result<bool> {
    if reduced.is_zero() {
        return Ok(false);
    }
    if (chart == Chart::Full || reduced.p >= 11) && reduced.is_nonsingular()? {
        return Ok(true);
    }
    Ok(reduced.smooth_point(chart)?.is_some())
}

/// Distinct k-rational linear factors of a nonzero quadratic form, each normalized with first
/// nonzero coefficient 1.
pub fn linear_factors(q: &FpPoly, p: u64) -> Vec<Vec<u64>> {
    let n = q.nvars;
    if q.is_zero() {
        return vec![];
    }
    if (p as u128).pow(n as u32 - 1) <= 2000 {
        return linear_forms(n, p).into_iter().filter(|l| q.compose_linear(&kernel(&[l.clone()], n, p), p).is_zero()).collect();
    }
    let mono = |i: usize, j: usize| -> Mono {
        let mut m = [0u8; 4];
        m[i] += 1;
        m[j] += 1;
        m
    };
    let Some(i) = (0..n).find(|&i| q.coeff(&mono(i, i)) != 0) else {
        // No square terms: shear x_j <- x_j + x_i so that x_i^2 appears.
        let (i, j) = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| q.coeff(&mono(i, j)) != 0).unwrap();
        let mut cols: Vec<Vec<u64>> = (0..n).map(|c| (0..n).map(|r| u64::from(r == c)).collect()).collect();
        cols[i][j] = 1;
        // q'(x') = q(T x'); a factor l' of q' gives the factor l' T^{-1} of q.
        let qs = q.compose_linear(&cols, p);
        return linear_factors(&qs, p)
            .into_iter()
            .map(|l| {
                let mut v = l.clone();
                v[i] = subm(v[i], v[j], p);
                normalize(&v, p)
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
    };
    let a = q.coeff(&mono(i, i));
    let b: Vec<u64> = (0..n).map(|j| if j == i { 0 } else { q.coeff(&mono(i, j)) }).collect();
    // D = B^2 - 4 a C as a symmetric coefficient table over the variables other than x_i.
    let mut d = vec![vec![0u64; n]; n];
    for j in 0..n {
        for k in j..n {
            if j == i || k == i {
                continue;
            }
            let bb = if j == k { mulm(b[j], b[j], p) } else { mulm(2, mulm(b[j], b[k], p), p) };
            d[j][k] = subm(bb, mulm(4, mulm(a, q.coeff(&mono(j, k)), p), p), p);
        }
    }
    let base: Vec<u64> = (0..n).map(|j| if j == i { mulm(2, a, p) } else { b[j] }).collect();
    let Some(j) = (0..n).find(|&j| d[j][j] != 0) else {
        if d.iter().flatten().all(|&x| x == 0) {
            return vec![normalize(&base, p)];
        }
        return vec![];
    };
    let Some(lj) = Fq::fp(p).sqrt([d[j][j], 0]) else { return vec![] };
    let lj = lj[0];
    let inv = invm(mulm(2, lj, p), p);
    let l: Vec<u64> = (0..n).map(|k| if k == i { 0 } else if k == j { lj } else { mulm(d[j.min(k)][j.max(k)], inv, p) }).collect();
    for x in 0..n {
        for y in x..n {
            if x == i || y == i {
                continue;
            }
            let sq = if x == y { mulm(l[x], l[x], p) } else { mulm(2, mulm(l[x], l[y], p), p) };
            if sq != d[x][y] {
                return vec![];
            }
        }
    }
    let f1: Vec<u64> = (0..n).map(|k| subm(base[k], l[k], p)).collect();
    let f2: Vec<u64> = (0..n).map(|k| addm(base[k], l[k], p)).collect();
    [normalize(&f1, p), normalize(&f2, p)].into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

/// All nonzero linear forms in n variables up to scaling.
fn linear_forms(n: usize, p: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for lead in 0..n {
        let free = n - lead - 1;
        for idx in 0..p.pow(free as u32) {
            let mut v = vec![0u64; n];
            v[lead] = 1;
            for t in 0..free {
                v[lead + 1 + t] = (idx / p.pow(t as u32)) % p;
            }
            out.push(v);
        }
    }
    out
}

/// A k-rational linear form dividing both quadratic forms, when one exists.
pub fn common_linear_factor(q1: &FpPoly, q2: &FpPoly, p: u64) -> Option<Vec<u64>> {
    let n = q1.nvars.max(q2.nvars);
    let (a, b) = if q1.is_zero() { (q2, q1) } else { (q1, q2) };
    linear_factors(a, p).into_iter().find(|l| b.compose_linear(&kernel(&[l.clone()], n, p), p).is_zero())
}

/// The quotient of a quadratic form by one of its linear factors.
pub fn divide_by_linear(q: &FpPoly, l: &[u64], p: u64) -> Option<Vec<u64>> {
    let n = q.nvars;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut m = [0u8; 4];
            m[i] += 1;
            m[j] += 1;
            let mut row = vec![0u64; n];
            if i == j {
                row[i] = l[i];
            } else {
                row[j] = addm(row[j], l[i], p);
                row[i] = addm(row[i], l[j], p);
            }
            rows.push(row);
            rhs.push(q.coeff(&m));
        }
    }
    solve_linear(&rows, &rhs, p)
}

// ---------------------------------------------------------------------------
// Non-regular points

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonRegularPoint {
    /// Coordinates over F_p: (x1, x2, y) for degree 2, else (x1, ..., xn).
    pub coords: Vec<u64>,
    /// Degree 4: the pencil member (lambda, mu) singular at the point whose value vanishes mod p^2.
    pub pencil: Option<(u64, u64)>,
}

fn val_at(f: &QPoly, pt: &[u64], p: u64) -> Valuation {
    val_rat(&f.eval(&lift(pt)), p)
}

fn at_least(v: Valuation, k: i64) -> bool {
    match v {
        Valuation::Infinity => true,
        Valuation::Finite(a) => a >= k,
    }
}

/// Filters singular k-points of the reduction by the mod-p^2 lifting condition.
pub fn nonregular_among(model: &GenusOneModel, reduced: &ReducedModel, singular: &[Vec<u64>]) -> Vec<NonRegularPoint> {
    let p = reduced.p;
    let eqs = model.equations();
    let mut out = Vec::new();
    for pt in singular {
        match model.degree() {
            4 => {
                let g = reduced.gradients(pt);
                let pencil = match rank(&g, p) {
                    0 => {
                        let pr = Rational::from_integer(p.into());
                        let a = rat_mod(&(eqs[0].eval(&lift(pt)) / &pr), p).unwrap_or(0);
                        let b = rat_mod(&(eqs[1].eval(&lift(pt)) / &pr), p).unwrap_or(0);
                        Some(if a == 0 { (1, 0) } else { (b, p - a) })
                    }
                    1 => {
                        let cols: Vec<Vec<u64>> = (0..4).map(|i| vec![g[0][i], g[1][i]]).collect();
                        let ker = kernel(&cols, 2, p);
                        let (l, m) = (ker[0][0], ker[0][1]);
                        let comb = &eqs[0].scale(&rat(l as i64, 1)) + &eqs[1].scale(&rat(m as i64, 1));
                        if at_least(val_at(&comb, pt, p), 2) {
                            Some((l, m))
                        } else {
                            None
                        }
                    }
                    _ => None,
                };
                if let Some(pc) = pencil {
                    out.push(NonRegularPoint { coords: pt.clone(), pencil: Some(pc) });
                }
            }
            _ => {
                if at_least(val_at(&eqs[0], pt, p), 2) {
                    out.push(NonRegularPoint { coords: pt.clone(), pencil: None });
                }
            }
        }
    }
    out
}

/// The non-regular k-points on the chart of the reduction of a p-integral model.
pub fn nonregular_points(model: &GenusOneModel, p: u64, chart: Chart) -> Result<Vec<NonRegularPoint>> {
    let red = reduce_model(model, p)?;
    if red.is_zero() {
        return Err(Error::Input("model vanishes identically mod p".into()));
    }
    let sv = red.survey(chart)?;
    Ok(nonregular_among(model, &red, &sv.singular))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(nvars: usize, p: u64, t: &[(Mono, i64)]) -> FpPoly {
        let terms: Vec<(Mono, u64)> = t.iter().map(|&(m, c)| (m, c.rem_euclid(p as i64) as u64)).collect();
        FpPoly::from_terms(nvars, &terms, p)
    }

    fn brute_projective(forms: &[FpPoly], n: usize, p: u64) -> BTreeSet<Vec<u64>> {
        let mut out = BTreeSet::new();
        let total = p.pow(n as u32);
        // Large primes are only enumerated on the hyperplane x1 = 0.
        let step = if p < 20 { 1 } else { p };
        for idx in (step..total).step_by(step as usize) {
            let v: Vec<u64> = (0..n).map(|i| (idx / p.pow(i as u32)) % p).collect();
            if forms.iter().all(|f| f.eval(&v, p) == 0) {
                out.insert(normalize_last(&v, p));
            }
        }
        out
    }

    #[test]
    fn sweeps_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &p in &[2u64, 3, 5, 7, 67, 71] {
            for _ in 0..6 {
                let q: Vec<FpPoly> = (0..2)
                    .map(|_| {
                        let t: Vec<(Mono, u64)> = crate::exactmath::monomials(4, 2).into_iter().map(|m| (m, rng.gen_range(0..p))).collect();
                        FpPoly::from_terms(4, &t, p)
                    })
                    .collect();
                let got: BTreeSet<Vec<u64>> = projective_solutions(&q, 4, p).unwrap().into_iter().collect();
                if p < 20 {
                    assert_eq!(got, brute_projective(&q, 4, p));
                } else {
                    for pt in &got {
                        assert!(q.iter().all(|f| f.eval(pt, p) == 0));
                    }
                    let slice = brute_projective(&q, 4, p).into_iter().filter(|v| v[0] == 0).collect::<BTreeSet<_>>();
                    let mine: BTreeSet<Vec<u64>> = got.iter().filter(|v| v[0] == 0).cloned().collect();
                    assert_eq!(slice, mine);
                }
            }
        }
    }

    #[test]
    fn cubic_points_and_lines() {
        let p = 7;
        let u = fp(3, p, &[([1, 1, 1, 0], 1)]);
        let red = ReducedModel { degree: 3, p, forms: vec![u] };
        let sv = red.survey(Chart::Full).unwrap();
        assert_eq!(sv.singular.len(), 3);
        assert_eq!(sv.smooth.len(), 3 * (p as usize - 1));
        let comps = sv.components();
        assert_eq!(comps.len(), 3);
        assert!(comps.iter().all(|c| matches!(c, Component::PlaneLine(_))));
    }

    #[test]
    fn quadric_lines_and_conics() {
        let p = 5;
        // (x1 x3, x2 x4): four lines.
        let red = ReducedModel { degree: 4, p, forms: vec![fp(4, p, &[([1, 0, 1, 0], 1)]), fp(4, p, &[([0, 1, 0, 1], 1)])] };
        assert_eq!(common_linear_factor(&red.forms[0], &red.forms[1], p), None);
        let comps = red.survey(Chart::Full).unwrap().components();
        assert_eq!(comps.len(), 4);
        assert!(comps.iter().all(|c| matches!(c, Component::SpaceLine(_))));
        // (x1 x4 - x2^2 - x3^2, x2 x3): two conics in the planes x2 = 0 and x3 = 0.
        let red = ReducedModel {
            degree: 4,
            p,
            forms: vec![fp(4, p, &[([1, 0, 0, 1], 1), ([0, 2, 0, 0], -1), ([0, 0, 2, 0], -1)]), fp(4, p, &[([0, 1, 1, 0], 1)])],
        };
        let comps = red.survey(Chart::Full).unwrap().components();
        assert_eq!(comps, [Component::Conic(vec![0, 0, 1, 0]), Component::Conic(vec![0, 1, 0, 0])].into_iter().collect());
        // (x1 x3 - x2^2, x2 x4 - x3^2): twisted cubic and a line.
        let red = ReducedModel {
            degree: 4,
            p,
            forms: vec![fp(4, p, &[([1, 0, 1, 0], 1), ([0, 2, 0, 0], -1)]), fp(4, p, &[([0, 1, 0, 1], 1), ([0, 0, 2, 0], -1)])],
        };
        let comps = red.survey(Chart::Full).unwrap().components();
        assert!(comps.contains(&Component::Main));
        assert_eq!(comps.len(), 2);
    }

    #[test]
    fn linear_factors_of_quadrics() {
        for &p in &[5u64, 101] {
            // (x1 + 2 x2)(x3 - x4) and x1 (x1 + x3)
            let l1 = fp(4, p, &[([1, 0, 0, 0], 1), ([0, 1, 0, 0], 2)]);
            let l2 = fp(4, p, &[([0, 0, 1, 0], 1), ([0, 0, 0, 1], -1)]);
            let l3 = fp(4, p, &[([1, 0, 0, 0], 1), ([0, 0, 1, 0], 1)]);
            let x1 = fp(4, p, &[([1, 0, 0, 0], 1)]);
            let q = l1.mul(&l2, p);
            let f = linear_factors(&q, p);
            assert_eq!(f.len(), 2);
            assert!(f.contains(&vec![1, 2, 0, 0]) && f.contains(&vec![0, 0, 1, p - 1]));
            let r = x1.mul(&l3, p);
            assert_eq!(common_linear_factor(&q, &l1.mul(&l3, p), p), Some(vec![1, 2, 0, 0]));
            assert_eq!(common_linear_factor(&q, &r, p), None);
            assert_eq!(divide_by_linear(&q, &[1, 2, 0, 0], p), Some(vec![0, 0, 1, p - 1]));
            // x1 x2 + x3^2 is irreducible.
            let irr = fp(4, p, &[([1, 1, 0, 0], 1), ([0, 0, 2, 0], 1)]);
            assert!(linear_factors(&irr, p).is_empty());
            // x1 x2 has no square terms.
            let h = fp(4, p, &[([1, 1, 0, 0], 1)]);
            assert_eq!(linear_factors(&h, p).len(), 2);
        }
    }

    #[test]
    fn binary_quartic_splitting() {
        // y^2 = 2 (x^2 + z^2)^2 over F_5: 2 is a non-square, so no smooth points.
        let p = 5;
        let q = fp(2, p, &[([4, 0, 0, 0], 2), ([2, 2, 0, 0], 4), ([0, 4, 0, 0], 2)]);
        let red = ReducedModel { degree: 2, p, forms: vec![FpPoly::zero(2), q] };
        assert_eq!(red.deg2_split(), Deg2Split::Conjugate);
        assert!(!has_smooth_kpoint(&red, Chart::Full).unwrap());
        // y^2 = x^2 z^2 over F_5: two rational curves.
        let q = fp(2, p, &[([2, 2, 0, 0], 1)]);
        let red = ReducedModel { degree: 2, p, forms: vec![FpPoly::zero(2), q] };
        assert!(matches!(red.deg2_split(), Deg2Split::Rational(_)));
        let comps = red.survey(Chart::Full).unwrap().components();
        assert_eq!(comps.len(), 2);
    }

    #[test]
    fn nonregular_scan_matches_definition() {
        // y^2 = p^2 x^4 + p x z^3 + z^4 at p = 5.
        let p = 5i64;
        let m = GenusOneModel::deg2(&[0, 0, 0], &[p * p, 0, 0, p, 1]);
        let red = reduce_model(&m, 5).unwrap();
        let sv = red.survey(Chart::Full).unwrap();
        // Reduction y^2 = z^4: two rational curves meeting at (1:0:0).
        assert_eq!(sv.singular, vec![vec![1, 0, 0]]);
        let nr = nonregular_points(&m, 5, Chart::Full).unwrap();
        // At (1:0:0) the equation is y^2 - 25 x^4 - 5 x z^3 - z^4, which is -25 mod 25.
        assert_eq!(nr.len(), 1);
        let good = GenusOneModel::deg2(&[0, 0, 0], &[1, 0, 0, 0, 1]);
        assert!(nonregular_points(&good, 5, Chart::Full).unwrap().is_empty());
    }
}
