//! The real-place contributions delta(Phi, r) and epsilon(Phi, r): the supremum and infimum over
//! C(R) of max(|F|, |rF + G|) / max|x_i|^(2n).
//!
//! Degree 2 candidates are the exact real roots of the univariate condition polynomials on the
//! two charts. Degrees 3 and 4 slice the real curve by one coordinate on each chart: branch points
//! are the exact real roots of a discriminant, and between them every branch is a smooth graph
//! whose extrema are located by dense sampling and golden-section refinement.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::covering::{covering_polynomials, CoveringData};
use crate::error::{Error, Result};
use crate::exactmath::rational::{f64_to_rat, rat, rat_to_f64, Rational};
use crate::exactmath::realroots::real_roots;
use crate::exactmath::{resultant, Mono, QPoly};
use crate::localsolve::is_soluble_real;
use crate::models::{is_nonsingular, GenusOneModel};

/// Which case of the critical-point characterization a candidate satisfies (to numerical
/// tolerance): (i) two coordinates tie for the maximum, (ii) |F| = |rF + G|, (iii) F = 0 for
/// degree 2, (iv) stationary point of F or rF + G on the curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Condition {
    #[serde(rename = "i")]
    Tie,
    #[serde(rename = "ii")]
    Crossing,
    #[serde(rename = "iii")]
    BranchPoint,
    #[serde(rename = "iv")]
    Stationary,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPoint {
    /// Homogeneous coordinates; (x1, x2, y) for degree 2.
    pub point: Vec<f64>,
    pub condition: Condition,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RealBounds {
    pub delta_inf: f64,
    pub epsilon_inf: f64,
    #[serde(serialize_with = "crate::models::ser_rat::serialize")]
    pub r: Rational,
    pub digits: u32,
    pub critical_points: Vec<CriticalPoint>,
}

impl RealBounds {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

/// F and rF + G as compiled floating-point polynomials together with their exact forms.
pub struct RatioFunction {
    pub degree: usize,
    f_exact: QPoly,
    h_exact: QPoly,
    f: Vec<(Mono, f64)>,
    h: Vec<(Mono, f64)>,
}

fn compile(p: &QPoly) -> Vec<(Mono, f64)> {
    p.terms().map(|(m, c)| (*m, rat_to_f64(c))).collect()
}

fn eval_f64(p: &[(Mono, f64)], x: &[f64]) -> f64 {
    p.iter()
        .map(|(m, c)| {
            let mut t = *c;
            for (i, &xi) in x.iter().enumerate() {
                if m[i] > 0 {
                    t *= xi.powi(m[i] as i32);
                }
            }
            t
        })
        .sum()
}

impl RatioFunction {
    pub fn new(cov: &CoveringData, r: &Rational) -> Self {
        let h_exact = &cov.f.scale(r) + &cov.g;
        RatioFunction {
            degree: cov.degree,
            f: compile(&cov.f),
            h: compile(&h_exact),
            f_exact: cov.f.clone(),
            h_exact,
        }
    }

    fn xs<'a, T>(&self, x: &'a [T]) -> &'a [T] {
        if self.degree == 2 {
            &x[..2]
        } else {
            x
        }
    }

    /// The ratio at a real point, evaluated in floating point.
    pub fn value(&self, x: &[f64]) -> f64 {
        let xs = self.xs(x);
        let m = xs.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let y: Vec<f64> = xs.iter().map(|v| v / m).collect();
        eval_f64(&self.f, &y).abs().max(eval_f64(&self.h, &y).abs())
    }

    /// The ratio at a real point, with F and rF + G evaluated exactly at the binary expansion.
    pub fn value_exact_f64(&self, x: &[f64]) -> f64 {
        let xs = self.xs(x);
        let m = xs.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let q: Vec<Rational> = xs.iter().map(|v| f64_to_rat(v / m)).collect();
        self.value_exact(&q)
    }

    /// The ratio at a rational point.
    pub fn value_exact(&self, x: &[Rational]) -> f64 {
        let xs = self.xs(x);
        let m = xs.iter().map(|v| v.abs()).max().unwrap_or_else(Rational::zero);
        let a = self.f_exact.eval(xs).abs();
        let b = self.h_exact.eval(xs).abs();
        let num = if a > b { a } else { b };
        rat_to_f64(&(num / num_traits::pow(m, 2 * self.degree)))
    }

    fn parts(&self, x: &[f64]) -> (f64, f64) {
        let xs = self.xs(x);
        (eval_f64(&self.f, xs), eval_f64(&self.h, xs))
    }

    fn condition(&self, x: &[f64]) -> Condition {
        let xs = self.xs(x);
        let mut mags: Vec<f64> = xs.iter().map(|v| v.abs()).collect();
        mags.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        if mags[0] - mags[1] <= 1e-7 * mags[0] {
            return Condition::Tie;
        }
        let (f, h) = self.parts(x);
        if (f.abs() - h.abs()).abs() <= 1e-7 * f.abs().max(h.abs()) {
            return Condition::Crossing;
        }
        Condition::Stationary
    }
}

fn check_model(model: &GenusOneModel) -> Result<()> {
    if !is_nonsingular(model) {
        return Err(Error::Domain("singular model".into()));
    }
    if !is_soluble_real(model)? {
        return Err(Error::Domain("the model has no real points".into()));
    }
    Ok(())
}

/// A finite set of real curve points containing every extremum location of the ratio.
pub fn critical_points(model: &GenusOneModel, r: &Rational) -> Result<Vec<CriticalPoint>> {
    check_model(model)?;
    let cov = covering_polynomials(model);
    let rf = RatioFunction::new(&cov, r);
    let pts = match model.degree() {
        2 => candidates_deg2(model, &rf)?,
        _ => Slicer::new(model, &rf)?.candidates()?,
    };
    Ok(pts)
}

/// delta(Phi, r) and epsilon(Phi, r) as the maximum and minimum over the critical points.
pub fn delta_epsilon_real(model: &GenusOneModel, r: &Rational, digits: u32) -> Result<RealBounds> {
    let mut pts = critical_points(model, r)?;
    if pts.is_empty() {
        return Err(Error::Precision("no real curve points were located; raise the precision".into()));
    }
    pts.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap_or(std::cmp::Ordering::Equal));
    let epsilon_inf = pts[0].value;
    let delta_inf = pts[pts.len() - 1].value;
    if !(epsilon_inf > 0.0 && delta_inf.is_finite()) {
        return Err(Error::Precision("ratio extremes are not separated from 0 or infinity".into()));
    }
    Ok(RealBounds { delta_inf, epsilon_inf, r: r.clone(), digits, critical_points: pts })
}

/// Real curve points with one coordinate drawn from a low-discrepancy sequence on each chart.
pub fn sample_curve_points(model: &GenusOneModel, count: usize) -> Result<Vec<Vec<f64>>> {
    check_model(model)?;
    let cov = covering_polynomials(model);
    let rf = RatioFunction::new(&cov, &Rational::zero());
    // Golden-ratio (Kronecker) sequence in [-1, 1].
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let coord = |k: usize| 2.0 * ((0.5 + k as f64 * phi) % 1.0) - 1.0;
    let max_steps = 50 * count.max(1);
    let mut out = Vec::new();
    if model.degree() == 2 {
        let f = compile(&cov.f);
        let pp = compile(&model.forms()[0]);
        let mut k = 0;
        while out.len() < count && k < max_steps {
            let t = coord(k / 2);
            let x = if k % 2 == 0 { [t, 1.0] } else { [1.0, t] };
            k += 1;
            let fv = eval_f64(&f, &x);
            if fv >= 0.0 {
                let pv = eval_f64(&pp, &x);
                let s = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
                out.push(vec![x[0], x[1], (-pv + s * fv.sqrt()) / 2.0]);
            }
        }
        return Ok(out);
    }
    let slicer = Slicer::new(model, &rf)?;
    let nv = slicer.views.len().max(1);
    let mut k = 0;
    while out.len() < count && k < max_steps {
        let view = &slicer.views[k % nv];
        let a = coord(k / nv);
        k += 1;
        for p in view.fiber(a) {
            if p.iter().all(|v| v.abs() <= 1.0 + 1e-12) {
                out.push(view.homogeneous(&p));
            }
        }
    }
    out.truncate(count);
    Ok(out)
}

/// Ratio values at sample points, with the number outside [eps (1 - tol), delta (1 + tol)].
#[derive(Clone, Debug, Serialize)]
pub struct Audit {
    pub samples: usize,
    pub outside: usize,
    pub min_sampled: f64,
    pub max_sampled: f64,
}

pub fn audit(model: &GenusOneModel, bounds: &RealBounds, count: usize, tol: f64) -> Result<Audit> {
    let cov = covering_polynomials(model);
    let rf = RatioFunction::new(&cov, &bounds.r);
    let pts = sample_curve_points(model, count)?;
    let mut a = Audit { samples: pts.len(), outside: 0, min_sampled: f64::INFINITY, max_sampled: 0.0 };
    for p in &pts {
        let v = rf.value(p);
        a.min_sampled = a.min_sampled.min(v);
        a.max_sampled = a.max_sampled.max(v);
        if v < bounds.epsilon_inf * (1.0 - tol) || v > bounds.delta_inf * (1.0 + tol) {
            a.outside += 1;
        }
    }
    Ok(a)
}

// ---------------------------------------------------------------------------
// Degree 2

fn univariate(p: &QPoly, chart: usize) -> QPoly {
    // chart 0: (t, 1); chart 1: (1, t).
    let t = QPoly::var(1, 0);
    let one = QPoly::one(1);
    let subs = if chart == 0 { vec![t, one] } else { vec![one, t] };
    p.subst(&subs)
}

fn candidates_deg2(model: &GenusOneModel, rf: &RatioFunction) -> Result<Vec<CriticalPoint>> {
    let width = rat(1, 1_000_000_000_000);
    let forms = model.forms();
    let mut out = Vec::new();
    for chart in 0..2 {
        let f = univariate(&rf.f_exact, chart);
        let h = univariate(&rf.h_exact, chart);
        let pp = univariate(&forms[0], chart);
        let mut cands: Vec<(Rational, Condition)> = vec![(rat(-1, 1), Condition::Tie), (rat(1, 1), Condition::Tie)];
        let conds = [
            (&f - &h, Condition::Crossing),
            (&f + &h, Condition::Crossing),
            (f.clone(), Condition::BranchPoint),
            (f.partial(0), Condition::Stationary),
            (h.partial(0), Condition::Stationary),
        ];
        for (poly, tag) in conds {
            if poly.is_zero() || poly.total_degree() == Some(0) {
                continue;
            }
            for iv in real_roots(&poly, &width)? {
                let t = iv.mid();
                if t.abs() <= rat(1, 1) {
                    cands.push((t, tag));
                }
            }
        }
        for (t, tag) in cands {
            let fv = f.eval(&[t.clone()]);
            let on_curve = tag == Condition::BranchPoint || !fv.is_negative();
            if !on_curve {
                continue;
            }
            let x = if chart == 0 { [t.clone(), rat(1, 1)] } else { [rat(1, 1), t.clone()] };
            let y = (rat_to_f64(&fv).max(0.0).sqrt() - rat_to_f64(&pp.eval(&[t.clone()]))) / 2.0;
            let value = rf.value_exact(&x);
            out.push(CriticalPoint { point: vec![rat_to_f64(&x[0]), rat_to_f64(&x[1]), y], condition: tag, value });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Degrees 3 and 4: slicing by one coordinate

/// Real roots of a real polynomial (constant term first) by recursive bracketing on the critical
/// points of its derivative.
fn real_roots_f64(c: &[f64]) -> Vec<f64> {
    let mut c = c.to_vec();
    while c.len() > 1 && c[c.len() - 1] == 0.0 {
        c.pop();
    }
    let d = c.len() - 1;
    if d == 0 {
        return vec![];
    }
    if d == 1 {
        return vec![-c[0] / c[1]];
    }
    let lead = c[d];
    let bound = 1.0 + c[..d].iter().fold(0.0f64, |m, v| m.max((v / lead).abs()));
    let deriv: Vec<f64> = (1..=d).map(|i| c[i] * i as f64).collect();
    let mut pts = vec![-bound];
    let mut crit = real_roots_f64(&deriv);
    crit.retain(|x| x.abs() < bound);
    crit.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.extend(crit);
    pts.push(bound);
    let ev = |x: f64| c.iter().rev().fold(0.0, |acc, v| acc * x + v);
    let mut roots: Vec<f64> = Vec::new();
    for w in pts.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (ev(lo), ev(hi));
        if flo == 0.0 {
            if roots.last().map_or(true, |&r| r != lo) {
                roots.push(lo);
            }
            continue;
        }
        if flo.signum() == fhi.signum() {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if ev(mid).signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    if ev(bound) == 0.0 {
        roots.push(bound);
    }
    roots
}

/// One chart x_c = 1 with the slicing coordinate a and the remaining coordinates.
struct View {
    n: usize,
    /// Original index of each affine coordinate (a, b, w), and of the chart coordinate.
    order: Vec<usize>,
    chart: usize,
    /// Plane curve in (a, b) whose real points over a are the b-coordinates of the fiber.
    plane_coeffs: Vec<Vec<(u8, f64)>>,
    /// Degree 3: U; degree 4: Q1, Q2; in the affine coordinates.
    eqs_f64: Vec<Vec<(Mono, f64)>>,
    breakpoints: Vec<f64>,
}

impl View {
    fn homogeneous(&self, p: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        x[self.chart] = 1.0;
        for (k, &i) in self.order.iter().enumerate() {
            x[i] = p[k];
        }
        x
    }

    /// Coefficients in b of the plane curve at a.
    fn plane_at(&self, a: f64) -> Vec<f64> {
        self.plane_coeffs.iter().map(|c| c.iter().map(|(e, v)| v * a.powi(*e as i32)).sum()).collect()
    }

    /// All real fiber points (a, b[, w]) over a, sorted by b.
    fn fiber(&self, a: f64) -> Vec<Vec<f64>> {
        let mut bs = real_roots_f64(&self.plane_at(a));
        bs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut out = Vec::new();
        for b in bs {
            if self.n == 3 {
                out.push(self.polish3(a, b));
            } else if let Some(p) = self.lift4(a, b) {
                out.push(p);
            }
        }
        out
    }

    fn polish3(&self, a: f64, mut b: f64) -> Vec<f64> {
        let u = &self.eqs_f64[0];
        for _ in 0..4 {
            let v = eval_f64(u, &[a, b]);
            let d = deriv_f64(u, &[a, b], 1);
            if d == 0.0 || !v.is_finite() {
                break;
            }
            let step = v / d;
            if !step.is_finite() || step.abs() > 1e-3 * (1.0 + b.abs()) {
                break;
            }
            b -= step;
        }
        vec![a, b]
    }

    fn lift4(&self, a: f64, b: f64) -> Option<Vec<f64>> {
        let (q1, q2) = (&self.eqs_f64[0], &self.eqs_f64[1]);
        let coeffs = |q: &[(Mono, f64)]| {
            let mut c = [0.0f64; 3];
            for (m, v) in q {
                c[m[2] as usize] += v * a.powi(m[0] as i32) * b.powi(m[1] as i32);
            }
            c
        };
        let mut best: Option<(f64, f64)> = None;
        for (qa, qb) in [(q1, q2), (q2, q1)] {
            let c = coeffs(qa);
            let ws: Vec<f64> = if c[2] != 0.0 {
                let disc = (c[1] * c[1] - 4.0 * c[2] * c[0]).max(0.0).sqrt();
                vec![(-c[1] + disc) / (2.0 * c[2]), (-c[1] - disc) / (2.0 * c[2])]
            } else if c[1] != 0.0 {
                vec![-c[0] / c[1]]
            } else {
                vec![]
            };
            for w in ws {
                let res = eval_f64(qb, &[a, b, w]).abs();
                if best.map_or(true, |(_, r)| res < r) {
                    best = Some((w, res));
                }
            }
            if best.is_some() {
                break;
            }
        }
        let (mut w, _) = best?;
        let mut b = b;
        for _ in 0..4 {
            let p = [a, b, w];
            let (f1, f2) = (eval_f64(q1, &p), eval_f64(q2, &p));
            let (j11, j12) = (deriv_f64(q1, &p, 1), deriv_f64(q1, &p, 2));
            let (j21, j22) = (deriv_f64(q2, &p, 1), deriv_f64(q2, &p, 2));
            let det = j11 * j22 - j12 * j21;
            if det == 0.0 {
                break;
            }
            let db = (f1 * j22 - f2 * j12) / det;
            let dw = (j11 * f2 - j21 * f1) / det;
            if !(db.is_finite() && dw.is_finite()) || db.abs() + dw.abs() > 1e-3 * (1.0 + b.abs() + w.abs()) {
                break;
            }
            b -= db;
            w -= dw;
        }
        let p = [a, b, w];
        let scale = 1.0 + a.abs().max(b.abs()).max(w.abs());
        let size = |q: &[(Mono, f64)]| q.iter().fold(0.0f64, |m, (_, v)| m.max(v.abs())) * scale * scale;
        let ok = eval_f64(q1, &p).abs() <= 1e-8 * size(q1) && eval_f64(q2, &p).abs() <= 1e-8 * size(q2);
        ok.then(|| p.to_vec())
    }
}

fn deriv_f64(p: &[(Mono, f64)], x: &[f64], i: usize) -> f64 {
    p.iter()
        .filter(|(m, _)| m[i] > 0)
        .map(|(m, c)| {
            let mut t = *c * m[i] as f64;
            for (j, &xj) in x.iter().enumerate() {
                let e = if j == i { m[j] as i32 - 1 } else { m[j] as i32 };
                if e > 0 {
                    t *= xj.powi(e);
                }
            }
            t
        })
        .sum()
}

struct Slicer<'a> {
    rf: &'a RatioFunction,
    views: Vec<View>,
}

const SAMPLES_PER_INTERVAL: usize = 160;

impl<'a> Slicer<'a> {
    fn new(model: &GenusOneModel, rf: &'a RatioFunction) -> Result<Self> {
        let n = model.degree();
        let forms = model.forms();
        let mut views = Vec::new();
        for chart in 0..n {
            let others: Vec<usize> = (0..n).filter(|&i| i != chart).collect();
            let mut built = None;
            for perm in permutations(&others) {
                if let Some(v) = build_view(n, chart, &perm, &forms)? {
                    built = Some(v);
                    break;
                }
            }
            views.push(built.ok_or_else(|| Error::Precision("no slicing direction has a nonzero discriminant".into()))?);
        }
        Ok(Slicer { rf, views })
    }

    fn value(&self, view: &View, p: &[f64]) -> f64 {
        self.rf.value(&view.homogeneous(p))
    }

    /// Ratio along branch k over a, if the fiber has the expected size.
    fn branch_value(&self, view: &View, a: f64, k: usize, size: usize) -> Option<(f64, Vec<f64>)> {
        let fib = view.fiber(a);
        (fib.len() == size).then(|| (self.value(view, &fib[k]), fib[k].clone()))
    }

    fn candidates(&self) -> Result<Vec<CriticalPoint>> {
        let mut out: Vec<CriticalPoint> = Vec::new();
        for view in &self.views {
            let mut cuts = vec![-1.0];
            cuts.extend(view.breakpoints.iter().copied().filter(|b| b.abs() < 1.0));
            cuts.push(1.0);
            for w in cuts.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                if hi - lo < 1e-14 {
                    continue;
                }
                // Chebyshev points of the second kind, endpoints nudged inside.
                let eps = 1e-11 * (hi - lo);
                let m = SAMPLES_PER_INTERVAL;
                let grid: Vec<f64> = (0..=m)
                    .map(|j| {
                        let c = (std::f64::consts::PI * j as f64 / m as f64).cos();
                        (0.5 * (lo + hi) - 0.5 * (hi - lo) * c).clamp(lo + eps, hi - eps)
                    })
                    .collect();
                let fibers: Vec<Vec<Vec<f64>>> = grid.iter().map(|&a| view.fiber(a)).collect();
                let mut counts: Vec<usize> = fibers.iter().map(|f| f.len()).collect();
                counts.sort_unstable();
                let size = counts[counts.len() / 2];
                for k in 0..size {
                    let series: Vec<(f64, f64, Vec<f64>)> = grid
                        .iter()
                        .zip(&fibers)
                        .filter(|(_, f)| f.len() == size)
                        .map(|(&a, f)| (a, self.value(view, &f[k]), f[k].clone()))
                        .collect();
                    for j in 0..series.len() {
                        let v = series[j].1;
                        let left = if j > 0 { Some(series[j - 1].1) } else { None };
                        let right = series.get(j + 1).map(|s| s.1);
                        let is_max = left.map_or(true, |l| v >= l) && right.map_or(true, |r| v >= r);
                        let is_min = left.map_or(true, |l| v <= l) && right.map_or(true, |r| v <= r);
                        if !(is_max || is_min) {
                            continue;
                        }
                        let a0 = if j > 0 { series[j - 1].0 } else { series[j].0 };
                        let a1 = series.get(j + 1).map_or(series[j].0, |s| s.0);
                        for want_max in [true, false] {
                            if (want_max && !is_max) || (!want_max && !is_min) {
                                continue;
                            }
                            let best = self.golden(view, a0, a1, k, size, want_max).unwrap_or((series[j].0, series[j].2.clone()));
                            let x = view.homogeneous(&best.1);
                            let value = self.rf.value_exact_f64(&x);
                            out.push(CriticalPoint { condition: self.rf.condition(&x), point: x, value });
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn golden(&self, view: &View, mut lo: f64, mut hi: f64, k: usize, size: usize, want_max: bool) -> Option<(f64, Vec<f64>)> {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let score = |a: f64| {
            self.branch_value(view, a, k, size).map(|(v, p)| (if want_max { -v } else { v }, p))
        };
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let mut f1 = score(x1)?;
        let mut f2 = score(x2)?;
        for _ in 0..80 {
            if hi - lo <= 1e-15 * (1.0 + lo.abs()) {
                break;
            }
            if f1.0 < f2.0 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = score(x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = score(x2)?;
            }
        }
        let best = if f1.0 < f2.0 { (x1, f1.1) } else { (x2, f2.1) };
        Some(best)
    }
}

fn permutations(v: &[usize]) -> Vec<Vec<usize>> {
    if v.len() <= 1 {
        return vec![v.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// The chart view with the given coordinate order, or None when its discriminant vanishes.
fn build_view(n: usize, chart: usize, order: &[usize], forms: &[QPoly]) -> Result<Option<View>> {
    let m = order.len();
    let mut subs = vec![QPoly::one(m); n];
    for (k, &i) in order.iter().enumerate() {
        subs[i] = QPoly::var(m, k);
    }
    let eqs: Vec<QPoly> = forms.iter().map(|f| f.subst(&subs)).collect();
    let plane = if n == 3 {
        eqs[0].clone()
    } else {
        let (q1, q2) = (&eqs[0], &eqs[1]);
        if q1.degree_in(2).unwrap_or(0) == 0 && q2.degree_in(2).unwrap_or(0) == 0 {
            return Ok(None);
        }
        resultant(q1, q2, 2)?
    };
    if plane.degree_in(1).unwrap_or(0) == 0 {
        return Ok(None);
    }
    let db = plane.partial(1);
    let disc = resultant(&plane, &db, 1)?;
    let lead = plane.coeffs_in(1).last().cloned().unwrap_or_else(|| QPoly::zero(m));
    let crit = &disc * &lead;
    if crit.is_zero() {
        return Ok(None);
    }
    let mut breakpoints = Vec::new();
    if crit.total_degree().unwrap_or(0) > 0 {
        for iv in real_roots(&crit.with_nvars(1), &rat(1, 1_000_000_000_000))? {
            breakpoints.push(iv.approx());
        }
    }
    breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let plane_coeffs: Vec<Vec<(u8, f64)>> = plane
        .coeffs_in(1)
        .iter()
        .map(|c| c.terms().map(|(mo, v)| (mo[0], rat_to_f64(v))).collect())
        .collect();
    let eqs_f64 = eqs.iter().map(compile).collect();
    Ok(Some(View { n, order: order.to_vec(), chart, plane_coeffs, eqs_f64, breakpoints }))
}

#[cfg(test)]
mod tests;
