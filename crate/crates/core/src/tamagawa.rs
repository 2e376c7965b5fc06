//! Tamagawa distances of integral genus one models at a prime, including the contributions of
//! k-rational lines and conics on the reduction, and the resulting local height contributions.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactmath::rational::{check_prime, rat, val_rat, Rational, Valuation};
use crate::exactmath::{Fq, Mono, UPoly};
use crate::models::{invariants, is_nonsingular, mat_identity, GenusOneModel, Mat};
use crate::redgeom::{
    has_smooth_kpoint, kernel, nonregular_among, reduce_model, solve_linear, Chart, Component, FpPoly,
};
use crate::steps::{forms_to_first, pencil, point_to_last, ratp, shift_y, subst, weighted};

/// The multiset of Tamagawa distances at p; empty means no Q_p-points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TamagawaDistances {
    pub p: u64,
    /// Sorted ascending.
    pub distances: Vec<u32>,
}

impl TamagawaDistances {
    pub fn min(&self) -> Option<u32> {
        self.distances.first().copied()
    }

    pub fn max(&self) -> Option<u32> {
        self.distances.last().copied()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({"p": self.p, "distances": self.distances, "min": self.min(), "max": self.max()})
    }
}

/// Exponents of |p| in delta_p and epsilon_p: 2 min A and 2 max A.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LocalContribution {
    pub p: u64,
    pub delta_exp: u32,
    pub epsilon_exp: u32,
}

impl LocalContribution {
    /// log delta_p = -delta_exp log p.
    pub fn log_delta(&self) -> f64 {
        -(self.delta_exp as f64) * (self.p as f64).ln()
    }

    pub fn log_epsilon(&self) -> f64 {
        -(self.epsilon_exp as f64) * (self.p as f64).ln()
    }
}

pub fn local_contribution(a: &TamagawaDistances) -> Result<LocalContribution> {
    match (a.min(), a.max()) {
        (Some(lo), Some(hi)) => Ok(LocalContribution { p: a.p, delta_exp: 2 * lo, epsilon_exp: 2 * hi }),
        _ => Err(Error::Domain(format!("no Q_{}-points, so no height bound exists", a.p))),
    }
}

/// The upper bound on the distances in terms of v(Delta): v/2, v and 2v for n = 2, 3, 4.
pub fn distance_bound(degree: usize, v_disc: u32) -> u32 {
    match degree {
        2 => v_disc / 2,
        3 => v_disc,
        _ => 2 * v_disc,
    }
}

/// Whether a multiset satisfies the bounds on Tamagawa distances for the given v(Delta).
pub fn satisfies_bounds(a: &TamagawaDistances, degree: usize, v_disc: u32) -> bool {
    let max_ok = a.max().map_or(true, |m| m <= distance_bound(degree, v_disc));
    let unit_ok = v_disc != 1 || a.distances == vec![0];
    max_ok && unit_ok
}

fn apply(model: &GenusOneModel, t: &crate::models::Transformation) -> Result<GenusOneModel> {
    t.apply(model)
}

fn v_disc(model: &GenusOneModel, p: u64) -> u32 {
    match val_rat(&invariants(model).disc, p) {
        Valuation::Finite(v) => v.max(0) as u32,
        Valuation::Infinity => 0,
    }
}

fn check_input(model: &GenusOneModel, p: u64) -> Result<()> {
    check_prime(p)?;
    if !model.is_p_integral(p) {
        return Err(Error::Input(format!("model is not {p}-integral")));
    }
    if !is_nonsingular(model) {
        return Err(Error::Domain("singular model".into()));
    }
    Ok(())
}

struct Ctx {
    p: u64,
    /// Cap on recursion depth and on subalgorithm iterations.
    cap: usize,
}

fn budget(what: &str) -> Error {
    Error::Budget(format!("{what} exceeded its iteration cap"))
}

fn inv_p(p: u64) -> Rational {
    ratp(p).recip()
}

fn p_pow(p: u64, e: i32) -> Rational {
    let b = ratp(p);
    if e >= 0 {
        num_traits::pow(b, e as usize)
    } else {
        num_traits::pow(b.recip(), (-e) as usize)
    }
}

fn int(a: u64) -> Rational {
    rat(a as i64, 1)
}

fn neg_int(a: u64, p: u64) -> Rational {
    rat(((p - a % p) % p) as i64, 1)
}

/// A GL_2(Z_p) matrix with first row (l, m).
fn pencil_with_first_row(l: u64, m: u64) -> Mat {
    if l != 0 {
        vec![vec![int(l), int(m)], vec![Rational::zero(), Rational::one()]]
    } else {
        vec![vec![int(l), int(m)], vec![Rational::one(), Rational::zero()]]
    }
}

/// Coefficients c with sum c_k gens_k = target over F_p.
fn solve_combination(gens: &[FpPoly], target: &FpPoly, p: u64) -> Option<Vec<u64>> {
    let mut monos: Vec<Mono> = gens.iter().chain(std::iter::once(target)).flat_map(|g| g.terms.iter().map(|(m, _)| *m)).collect();
    monos.sort();
    monos.dedup();
    if monos.is_empty() {
        return Some(vec![0; gens.len()]);
    }
    let rows: Vec<Vec<u64>> = monos.iter().map(|m| gens.iter().map(|g| g.coeff(m)).collect()).collect();
    let rhs: Vec<u64> = monos.iter().map(|m| target.coeff(m)).collect();
    solve_linear(&rows, &rhs, p)
}

fn monomial(nvars: usize, m: Mono, p: u64) -> FpPoly {
    FpPoly::from_terms(nvars, &[(m, 1)], p)
}

fn unit_mono(nvars: usize, i: usize) -> Mono {
    let mut m = [0u8; 4];
    if i < nvars {
        m[i] = 1;
    }
    m
}

/// The part of f of degree d in the first variable, with that variable removed.
fn coefficient_in_first(f: &FpPoly, d: u8, p: u64) -> FpPoly {
    let terms: Vec<(Mono, u64)> = f
        .terms
        .iter()
        .filter(|(m, _)| m[0] == d)
        .map(|(m, c)| {
            let mut mm = *m;
            mm[0] = 0;
            (mm, *c)
        })
        .collect();
    FpPoly::from_terms(f.nvars, &terms, p)
}

impl Ctx {
    fn distances(&self, model: &GenusOneModel, chart: Chart, depth: usize) -> Result<Vec<u32>> {
        if depth > self.cap {
            return Err(budget("Tamagawa distance recursion"));
        }
        let p = self.p;
        let red = reduce_model(model, p)?;
        if red.is_zero() {
            return Err(if depth == 0 {
                Error::Input("model vanishes identically mod p".into())
            } else {
                Error::Domain(format!("model is not minimal at {p}: a blown-up chart reduces to zero"))
            });
        }
        if (chart == Chart::Full || p >= 11) && red.is_nonsingular()? && has_smooth_kpoint(&red, chart)? {
            return Ok(vec![0]);
        }
        let sv = red.survey(chart)?;
        let mut out = Vec::new();
        for comp in sv.components() {
            match comp {
                Component::Main | Component::Section(_) => out.push(0),
                Component::PlaneLine(l) => out.push(self.line3(model, &l)?),
                Component::SpaceLine(l) => out.push(self.line4(model, &l)?),
                Component::Conic(plane) => out.push(self.conic4(model, &plane)?),
            }
        }
        for np in nonregular_among(model, &red, &sv.singular) {
            let (next, shift) = match model.degree() {
                2 => {
                    let s = point_to_last(&np.coords[..2]);
                    let m = apply(model, &subst(2, &s))?;
                    let m = apply(&m, &shift_y([Rational::zero(), Rational::zero(), int(np.coords[2])]))?;
                    (apply(&m, &weighted(2, &[ratp(p), Rational::one()], &[inv_p(p)]))?, 1)
                }
                3 => {
                    let m = apply(model, &subst(3, &point_to_last(&np.coords)))?;
                    (apply(&m, &weighted(3, &[ratp(p), ratp(p), Rational::one()], &[p_pow(p, -2)]))?, 2)
                }
                _ => {
                    let m = apply(model, &subst(4, &point_to_last(&np.coords)))?;
                    let (l, mu) = np.pencil.ok_or_else(|| Error::Domain("non-regular point without pencil member".into()))?;
                    let m = apply(&m, &pencil(pencil_with_first_row(l, mu)))?;
                    let one = Rational::one();
                    let d = [ratp(p), ratp(p), ratp(p), one];
                    (apply(&m, &weighted(4, &d, &[p_pow(p, -2), inv_p(p)]))?, 3)
                }
            };
            for a in self.distances(&next, Chart::Affine, depth + 1)? {
                out.push(a + shift);
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Moves the line {l = 0} of a cubic to {x = 0} and runs the line algorithm.
    fn line3(&self, model: &GenusOneModel, l: &[u64]) -> Result<u32> {
        let s = forms_to_first(&[l.to_vec()], 3, self.p)?;
        self.line3_at_x(&apply(model, &subst(3, &s))?)
    }

    fn line3_at_x(&self, model: &GenusOneModel) -> Result<u32> {
        let p = self.p;
        let mut u = model.clone();
        let mut alpha = 0u32;
        for _ in 0..self.cap {
            u = apply(&u, &weighted(3, &[ratp(p), Rational::one(), Rational::one()], &[inv_p(p)]))?;
            alpha += 1;
            let red = reduce_model(&u, p)?;
            let f = &red.forms[0];
            let f2 = coefficient_in_first(f, 1, p);
            let f3 = coefficient_in_first(f, 0, p);
            if f2.is_zero() {
                return Err(Error::Domain("line is not a multiplicity-one component".into()));
            }
            let gens = [monomial(3, unit_mono(3, 1), p).mul(&f2, p), monomial(3, unit_mono(3, 2), p).mul(&f2, p)];
            match solve_combination(&gens, &f3, p) {
                Some(ab) => {
                    let mut s = mat_identity(3);
                    s[0][1] = neg_int(ab[0], p);
                    s[0][2] = neg_int(ab[1], p);
                    u = apply(&u, &subst(3, &s))?;
                }
                None => return Ok(alpha),
            }
        }
        Err(budget("line contribution"))
    }

    /// Moves the plane {l = 0} of a conic component to {x1 = 0} and runs the conic algorithm.
    fn conic4(&self, model: &GenusOneModel, plane: &[u64]) -> Result<u32> {
        let s = forms_to_first(&[plane.to_vec()], 4, self.p)?;
        self.conic4_at_x1(&apply(model, &subst(4, &s))?)
    }

    fn conic4_at_x1(&self, model: &GenusOneModel) -> Result<u32> {
        let p = self.p;
        let mut m = model.clone();
        let mut alpha = 0u32;
        for _ in 0..self.cap {
            // Make the first quadric vanish on {x1 = 0} modulo p.
            let red = reduce_model(&m, p)?;
            let q: Vec<FpPoly> = red.forms.iter().map(|f| coefficient_in_first(f, 0, p)).collect();
            let ker = kernel_of_pair(&q[0], &q[1], p).ok_or_else(|| Error::Domain("conic is not a component".into()))?;
            m = apply(&m, &pencil(pencil_with_first_row(ker.0, ker.1)))?;
            let one = Rational::one();
            let t = weighted(4, &[ratp(p), one.clone(), one.clone(), one.clone()], &[inv_p(p), one]);
            m = apply(&m, &t)?;
            alpha += 1;
            let red = reduce_model(&m, p)?;
            let l1 = coefficient_in_first(&red.forms[0], 1, p);
            let q1 = coefficient_in_first(&red.forms[0], 0, p);
            let q2 = coefficient_in_first(&red.forms[1], 0, p);
            let gens: Vec<FpPoly> =
                (1..4).map(|i| monomial(4, unit_mono(4, i), p).mul(&l1, p)).chain(std::iter::once(q2)).collect();
            match solve_combination(&gens, &q1, p) {
                Some(c) => {
                    let mut s = mat_identity(4);
                    for i in 0..3 {
                        s[0][i + 1] = neg_int(c[i], p);
                    }
                    m = apply(&m, &subst(4, &s))?;
                }
                None => return Ok(alpha),
            }
        }
        Err(budget("conic contribution"))
    }

    /// Moves the line spanned by the given points to {x1 = x2 = 0} and runs the line algorithm.
    fn line4(&self, model: &GenusOneModel, span: &[Vec<u64>]) -> Result<u32> {
        let ann = kernel(span, 4, self.p);
        let s = forms_to_first(&ann, 4, self.p)?;
        self.line4_at_x1x2(&apply(model, &subst(4, &s))?)
    }

    fn line4_at_x1x2(&self, model: &GenusOneModel) -> Result<u32> {
        let p = self.p;
        let k = Fq::fp(p);
        let mut m = model.clone();
        let mut alpha = 0u32;
        for _ in 0..self.cap {
            let inv = inv_p(p);
            let one = Rational::one();
            m = apply(&m, &weighted(4, &[ratp(p), ratp(p), one.clone(), one], &[inv.clone(), inv]))?;
            alpha += 2;
            let red = reduce_model(&m, p)?;
            let c = |f: &FpPoly, i: usize, j: usize| {
                let mut mm = [0u8; 4];
                mm[i] += 1;
                mm[j] += 1;
                f.coeff(&mm)
            };
            let (q1, q2) = (&red.forms[0], &red.forms[1]);
            // Entries of sC + tD as binary linear forms in (s, t).
            let lin = |a: u64, b: u64| FpPoly::from_terms(2, &[([1, 0, 0, 0], a), ([0, 1, 0, 0], b)], p);
            let e11 = lin(c(q1, 0, 2), c(q1, 0, 3));
            let e12 = lin(c(q1, 1, 2), c(q1, 1, 3));
            let e21 = lin(c(q2, 0, 2), c(q2, 0, 3));
            let e22 = lin(c(q2, 1, 2), c(q2, 1, 3));
            let on_line = |f: &FpPoly| {
                FpPoly::from_terms(2, &[([2, 0, 0, 0], c(f, 2, 2)), ([1, 1, 0, 0], c(f, 2, 3)), ([0, 2, 0, 0], c(f, 3, 3))], p)
            };
            let (r1, r2) = (on_line(q1), on_line(q2));
            let g = e11.mul(&e22, p).sub(&e12.mul(&e21, p), p);
            if g.is_zero() {
                return Err(Error::Domain("line is not a multiplicity-one component".into()));
            }
            let f1 = e22.mul(&r1, p).sub(&e12.mul(&r2, p), p);
            let f2 = e11.mul(&r2, p).sub(&e21.mul(&r1, p), p);
            let sg = monomial(2, [1, 0, 0, 0], p).mul(&g, p);
            let tg = monomial(2, [0, 1, 0, 0], p).mul(&g, p);
            let gens = [sg.clone(), tg.clone()];
            if let (Some(a1), Some(a2)) = (solve_combination(&gens, &f1, p), solve_combination(&gens, &f2, p)) {
                // f1 = (l1 s + m1 t) g and f2 = (l2 s + m2 t) g; the curve is the line
                // x1 + l1 x3 + m1 x4 = x2 + l2 x3 + m2 x4 = 0, moved to {x1 = x2 = 0}.
                let mut s = mat_identity(4);
                s[0][2] = neg_int(a1[0], p);
                s[0][3] = neg_int(a1[1], p);
                s[1][2] = neg_int(a2[0], p);
                s[1][3] = neg_int(a2[1], p);
                m = apply(&m, &subst(4, &s))?;
                continue;
            }
            if !common_binary_factor(&k, &[&f1, &f2, &g], p) {
                return Ok(alpha);
            }
            let curve = [f1.scale(p - 1, p), f2.scale(p - 1, p), sg, tg];
            let mut monos: Vec<Mono> = curve.iter().flat_map(|f| f.terms.iter().map(|(mm, _)| *mm)).collect();
            monos.sort();
            monos.dedup();
            let rows: Vec<Vec<u64>> = monos.iter().map(|mm| curve.iter().map(|f| f.coeff(mm)).collect()).collect();
            let ell = kernel(&rows, 4, p).into_iter().next().ok_or_else(|| Error::Domain("no plane through the conic".into()))?;
            let s = forms_to_first(&[ell], 4, p)?;
            m = apply(&m, &subst(4, &s))?;
            return Ok(alpha + self.conic4_at_x1(&m)?);
        }
        Err(budget("line contribution"))
    }
}

/// A nonzero (l, m) with l q1 + m q2 = 0 over F_p.
fn kernel_of_pair(q1: &FpPoly, q2: &FpPoly, p: u64) -> Option<(u64, u64)> {
    let mut monos: Vec<Mono> = q1.terms.iter().chain(q2.terms.iter()).map(|(m, _)| *m).collect();
    monos.sort();
    monos.dedup();
    if monos.is_empty() {
        return Some((1, 0));
    }
    let rows: Vec<Vec<u64>> = monos.iter().map(|m| vec![q1.coeff(m), q2.coeff(m)]).collect();
    kernel(&rows, 2, p).first().map(|v| (v[0], v[1]))
}

/// Whether nonzero binary forms (and any zero ones) share a linear factor over F_p.
fn common_binary_factor(k: &Fq, forms: &[&FpPoly], p: u64) -> bool {
    let nonzero: Vec<&&FpPoly> = forms.iter().filter(|f| !f.is_zero()).collect();
    if nonzero.is_empty() {
        return true;
    }
    let t_divides = nonzero.iter().all(|f| f.terms.iter().all(|(m, _)| m[1] > 0));
    if t_divides {
        return true;
    }
    let mut g: UPoly = vec![];
    for f in &nonzero {
        let u = f.specialize(&[None, Some(1)], p).to_upoly();
        g = if g.is_empty() { k.monic(&u) } else { k.pgcd(&g, &u) };
    }
    !k.roots(&g).is_empty()
}

/// The multiset of Tamagawa distances of a p-integral nonsingular model.
pub fn tamagawa_distances(model: &GenusOneModel, p: u64, chart: Chart) -> Result<TamagawaDistances> {
    check_input(model, p)?;
    let cap = 4 * v_disc(model, p) as usize + 16;
    let ctx = Ctx { p, cap };
    Ok(TamagawaDistances { p, distances: ctx.distances(model, chart, 0)? })
}

/// Contribution of a k-rational multiplicity-1 line {l = 0} on the reduction of a cubic.
pub fn line_contribution_deg3(model: &GenusOneModel, p: u64, line: &[u64]) -> Result<u32> {
    check_input(model, p)?;
    Ctx { p, cap: 4 * v_disc(model, p) as usize + 16 }.line3(model, line)
}

/// Contribution of a k-rational multiplicity-1 conic lying in the plane {l = 0}.
pub fn conic_contribution_deg4(model: &GenusOneModel, p: u64, plane: &[u64]) -> Result<u32> {
    check_input(model, p)?;
    Ctx { p, cap: 4 * v_disc(model, p) as usize + 16 }.conic4(model, plane)
}

/// Contribution of a k-rational multiplicity-1 line spanned by two points of P^3(F_p).
pub fn line_contribution_deg4(model: &GenusOneModel, p: u64, span: &[Vec<u64>]) -> Result<u32> {
    check_input(model, p)?;
    Ctx { p, cap: 4 * v_disc(model, p) as usize + 16 }.line4(model, span)
}

#[cfg(test)]
mod tests;
