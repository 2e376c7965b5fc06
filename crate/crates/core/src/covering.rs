//! Covering-map polynomials F_n, G_n of genus one models and evaluation of the n-covering map.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exactmath::mpoly::det_cofactor;
use crate::exactmath::rational::{format_rational, rat, val_rat, Rational};
use crate::exactmath::QPoly;
use crate::models::{
    cubic_covariants, doubling, invariants, mat_det, sym_index, GenusOneModel, InvariantData, Transformation,
    WeierstrassCurve,
};

/// Polynomials realizing the covering map. `f` and `g` are F_n and G_n, homogeneous of degree 2n
/// in the model variables (x1, x2 for degree 2).
#[derive(Clone, Debug)]
pub struct CoveringData {
    pub degree: usize,
    pub invariants: InvariantData,
    pub f: QPoly,
    pub g: QPoly,
    /// Named intermediates. Degree 2: F, g, h, k, X in (x1, x2) and Z, Y in (x1, x2, y).
    /// Degree 3: H, Theta, J, Z, X, Y. Degree 4: pf, rd, F2, G2 in (x, z) and T1, T2, J, Y.
    pub parts: BTreeMap<String, QPoly>,
}

impl CoveringData {
    pub fn part(&self, name: &str) -> &QPoly {
        &self.parts[name]
    }

    pub fn to_json(&self) -> Value {
        let mut m = serde_json::Map::new();
        m.insert("degree".into(), Value::from(self.degree));
        m.insert("F".into(), Value::String(self.f.to_string()));
        m.insert("G".into(), Value::String(self.g.to_string()));
        for (k, v) in &self.parts {
            m.insert(k.clone(), Value::String(v.to_string()));
        }
        Value::Object(m)
    }

    /// (F_n(x), G_n(x)) at a point given in model coordinates.
    pub fn eval_fg(&self, pt: &[Rational]) -> (Rational, Rational) {
        let xs = if self.degree == 2 { &pt[..2] } else { pt };
        (self.f.eval(xs), self.g.eval(xs))
    }
}

fn c(x: i64) -> Rational {
    rat(x, 1)
}

/// F_2, G_2 and intermediates of a generalised binary quartic.
fn covering_deg2(p: &QPoly, q: &QPoly, inv: &InvariantData) -> (QPoly, QPoly, BTreeMap<String, QPoly>) {
    let g = &p.pow(2).scale(&rat(1, 4)) + q;
    let g1 = g.partial(0);
    let g2 = g.partial(1);
    let g11 = g1.partial(0);
    let g12 = g1.partial(1);
    let g22 = g2.partial(1);
    let h = (&g12.pow(2) - &(&g11 * &g22)).scale(&rat(1, 3));
    let k = (&(&g2 * &h.partial(0)) - &(&g1 * &h.partial(1))).scale(&rat(1, 12));
    let f = (&p.pow(2) + &q.scale(&c(4))).clone();
    let x = (&h - &g.scale(&inv.b2)).scale(&rat(1, 3));
    let y = QPoly::var(3, 2);
    let z = &y.scale(&c(2)) + &p.with_nvars(3);
    let x3 = x.with_nvars(3);
    let f3 = f.with_nvars(3);
    let yy = &(&k.with_nvars(3) - &(&x3 * &z).scale(&(&inv.a1 / c(2)))) - &(&f3 * &z).scale(&(&inv.a3 / c(2)));
    let mut parts = BTreeMap::new();
    parts.insert("F".to_string(), f.clone());
    parts.insert("g".to_string(), g);
    parts.insert("h".to_string(), h);
    parts.insert("k".to_string(), k);
    parts.insert("X".to_string(), x.clone());
    parts.insert("Z".to_string(), z);
    parts.insert("Y".to_string(), yy);
    (f, x, parts)
}

/// T1, T2 and J of a quadric intersection.
pub fn quadric_covariants(q1: &[Rational; 10], q2: &[Rational; 10]) -> (QPoly, QPoly, QPoly) {
    let hess = |q: &[Rational; 10]| -> Vec<Vec<Rational>> {
        (0..4)
            .map(|i| (0..4).map(|j| if i == j { &q[sym_index(i, i)] * c(2) } else { q[sym_index(i, j)].clone() }).collect())
            .collect()
    };
    let a = hess(q1);
    let b = hess(q2);
    let t = |a: &Vec<Vec<Rational>>, b: &Vec<Vec<Rational>>| -> QPoly {
        let adj = adjugate(b);
        let mut out = QPoly::zero(4);
        for i in 0..4 {
            for j in 0..4 {
                let mut coef = Rational::zero();
                for r in 0..4 {
                    for s in r..4 {
                        let bstar = if r == s { &adj[r][r] / c(2) } else { adj[r][s].clone() };
                        if bstar.is_zero() {
                            continue;
                        }
                        coef += bstar * (&a[i][j] * &a[r][s] - &a[i][s] * &a[j][r]);
                    }
                }
                if !coef.is_zero() {
                    let mut m = [0u8; 4];
                    m[i] += 1;
                    m[j] += 1;
                    out.add_term(m, coef);
                }
            }
        }
        out
    };
    let t1 = t(&a, &b);
    let t2 = t(&b, &a);
    let forms = GenusOneModel::Deg4 { q1: q1.clone(), q2: q2.clone() }.forms();
    let jac: Vec<Vec<QPoly>> =
        [&forms[0], &forms[1], &t1, &t2].iter().map(|f| (0..4).map(|i| f.partial(i)).collect()).collect();
    let j = det_cofactor(&jac).scale(&rat(1, 4));
    (t1, t2, j)
}

fn adjugate(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = m.len();
    let mut adj = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<Rational>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&s| s != i).map(|s| m[r][s].clone()).collect())
                .collect();
            let d = mat_det(&minor);
            adj[i][j] = if (i + j) % 2 == 0 { d } else { -d };
        }
    }
    adj
}

/// Computes F_n, G_n and all intermediates symbolically.
pub fn covering_polynomials(model: &GenusOneModel) -> CoveringData {
    let inv = invariants(model);
    match model {
        GenusOneModel::Deg2 { .. } => {
            let fm = model.forms();
            let (f, g, parts) = covering_deg2(&fm[0], &fm[1], &inv);
            CoveringData { degree: 2, invariants: inv, f, g, parts }
        }
        GenusOneModel::Deg3 { .. } => {
            let u = model.forms().remove(0);
            let (h, th, j) = cubic_covariants(&u);
            let b2 = &inv.b2;
            let z = (&h + &u.scale(b2)).scale(&rat(1, 4));
            let x = (&(&(&th - &z.pow(2).scale(&(b2 * c(16)))) - &(&z * &u).scale(&(b2 * b2 * c(12))))
                + &u.pow(2).scale(&(b2 * b2 * b2)))
                .scale(&rat(1, 192));
            let inner = &(&(&(&(&x * &z).scale(&inv.a1) + &z.pow(3).scale(&inv.a3)) + &(&x * &u).scale(&inv.a3))
                + &(&z * &u.pow(2)).scale(&(&inv.a1 * &inv.b6)))
                + &u.pow(3).scale(&(&inv.a1 * &inv.b8));
            let y = (&j.scale(&rat(1, 384)) - &inner).scale(&rat(1, 2));
            let f = z.pow(2);
            let mut parts = BTreeMap::new();
            parts.insert("H".to_string(), h);
            parts.insert("Theta".to_string(), th);
            parts.insert("J".to_string(), j);
            parts.insert("Z".to_string(), z);
            parts.insert("X".to_string(), x.clone());
            parts.insert("Y".to_string(), y);
            CoveringData { degree: 3, invariants: inv, f, g: x, parts }
        }
        GenusOneModel::Deg4 { q1, q2 } => {
            let dbl = doubling(q1, q2);
            let df = dbl.forms();
            let (pf, rd) = (df[0].clone(), df[1].clone());
            let (f2, g2, _) = covering_deg2(&pf, &rd, &inv);
            let (t1, t2, j) = quadric_covariants(q1, q2);
            let fm = model.forms();
            let (qq1, qq2) = (&fm[0], &fm[1]);
            let l = pf.coeff(&[2, 0, 0, 0]);
            let m = pf.coeff(&[1, 1, 0, 0]);
            let n = pf.coeff(&[0, 2, 0, 0]);
            let terms = [
                (t1.pow(2), -l.clone()),
                (&t1 * &t2, m.clone()),
                (t2.pow(2), -n.clone()),
                (&t1 * qq1, &m * &n * &l),
                (&t2 * qq1, &m * &n * &m),
                (&t1 * qq2, &l * &m * &m),
                (&t2 * qq2, &l * &m * &n),
                (qq1.pow(2), &l * &l * &n * &n * &n),
                (qq1 * qq2, &l * &m * &n * (&l * &n + &m * &m)),
                (qq2.pow(2), &l * &l * &l * &n * &n),
            ];
            let mut y = j.clone();
            for (t, k) in terms.iter() {
                y = &y + &t.scale(k);
            }
            let y = y.scale(&rat(1, 2));
            let sub = [t1.clone(), -&t2];
            let f = f2.subst(&sub);
            let g = g2.subst(&sub);
            let mut parts = BTreeMap::new();
            parts.insert("pf".to_string(), pf);
            parts.insert("rd".to_string(), rd);
            parts.insert("F2".to_string(), f2);
            parts.insert("G2".to_string(), g2);
            parts.insert("T1".to_string(), t1);
            parts.insert("T2".to_string(), t2);
            parts.insert("J".to_string(), j);
            parts.insert("Y".to_string(), y);
            CoveringData { degree: 4, invariants: inv, f, g, parts }
        }
    }
}

/// A point of E(Q) on the Weierstrass equation with the model's a-invariants.
#[derive(Clone, Debug, PartialEq)]
pub enum CurvePoint {
    Infinity,
    Affine { x: Rational, y: Rational },
}

impl CurvePoint {
    pub fn to_json(&self) -> Value {
        match self {
            CurvePoint::Infinity => serde_json::json!("infinity"),
            CurvePoint::Affine { x, y } => serde_json::json!({"x": format_rational(x), "y": format_rational(y)}),
        }
    }
}

/// Scales a projective point to coprime integers. Degree 2 points (x1 : x2 : y) use weights (1, 1, 2).
pub fn normalize_point(degree: usize, pt: &[Rational]) -> Result<Vec<BigInt>> {
    let xs = if degree == 2 { &pt[..2] } else { pt };
    if xs.iter().all(|x| x.is_zero()) && (degree != 2 || pt[2].is_zero()) {
        return Err(Error::Input("the zero vector is not a projective point".into()));
    }
    if degree == 2 {
        if xs.iter().all(|x| x.is_zero()) {
            return Ok(vec![BigInt::zero(), BigInt::zero(), pt[2].signum().to_integer()]);
        }
        // Clear denominators of x1, x2 by lambda, then y scales by lambda^2.
        let den = xs.iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
        let num = xs.iter().fold(BigInt::zero(), |a, x| a.gcd(&(x * Rational::from_integer(den.clone())).to_integer()));
        let lam = Rational::new(den, num);
        let out: Vec<Rational> = vec![&pt[0] * &lam, &pt[1] * &lam, &pt[2] * &lam * &lam];
        if !out[2].is_integer() {
            // y is integral on integral models; otherwise scale by its denominator.
            let s = out[2].denom().clone();
            let s = Rational::from_integer(s);
            return Ok(vec![(&out[0] * &s).to_integer(), (&out[1] * &s).to_integer(), (&out[2] * &s * &s).to_integer()]);
        }
        return Ok(out.iter().map(|x| x.to_integer()).collect());
    }
    let den = pt.iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
    let ints: Vec<BigInt> = pt.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |a, x| a.gcd(x));
    Ok(ints.iter().map(|x| x / &g).collect())
}

/// Image of a point of C_Phi under the covering map.
pub fn evaluate_covering(model: &GenusOneModel, point: &[Rational]) -> Result<CurvePoint> {
    let cov = covering_polynomials(model);
    evaluate_with(&cov, model, point)
}

pub fn evaluate_with(cov: &CoveringData, model: &GenusOneModel, point: &[Rational]) -> Result<CurvePoint> {
    let need = if model.degree() == 2 { 3 } else { model.degree() };
    if point.len() != need {
        return Err(Error::Input(format!("point needs {need} coordinates")));
    }
    if point.iter().all(|x| x.is_zero()) {
        return Err(Error::Input("the zero vector is not a projective point".into()));
    }
    if !model.contains(point) {
        return Err(Error::Input("point does not lie on the model".into()));
    }
    let (fv, gv) = cov.eval_fg(point);
    if fv.is_zero() && gv.is_zero() {
        return Err(Error::Domain("point lies in the base locus of the covering map".into()));
    }
    match model {
        GenusOneModel::Deg2 { .. } | GenusOneModel::Deg3 { .. } => {
            let z = cov.part("Z").eval(point);
            if z.is_zero() {
                return Ok(CurvePoint::Infinity);
            }
            let xs = if model.degree() == 2 { &point[..2] } else { point };
            let x = cov.part("X").eval(xs);
            let y = cov.part("Y").eval(point);
            Ok(CurvePoint::Affine { x: &x / (&z * &z), y: &y / (&z * &z * &z) })
        }
        GenusOneModel::Deg4 { q1, q2 } => {
            let t1 = cov.part("T1").eval(point);
            let t2 = cov.part("T2").eval(point);
            let y = cov.part("Y").eval(point);
            let dbl = doubling(q1, q2);
            let dcov = covering_polynomials(&dbl);
            evaluate_with(&dcov, &dbl, &[t1, -t2, y])
        }
    }
}

/// The Weierstrass curve with the model's a-invariants (possibly singular).
pub fn covering_curve(model: &GenusOneModel) -> WeierstrassCurve {
    WeierstrassCurve::new(invariants(model).ainvariants())
}

/// True iff F_n and G_n both vanish at the point.
pub fn base_locus_test(model: &GenusOneModel, point: &[Rational]) -> bool {
    let cov = covering_polynomials(model);
    let (f, g) = cov.eval_fg(point);
    f.is_zero() && g.is_zero()
}

/// Which hypothesis of the transformation theorem a transformation satisfies at p.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformHypothesis {
    Integral,
    DiagonalUnitDet,
    Unverifiable,
}

/// F'(x') = det(N)^-2 det(g)^r F(x) and G'(x') = det(N)^-2 (lambda F(x) + det(g)^s G(x)) on the curve,
/// where x_j = sum_i n_ij x'_i.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformLaw {
    pub det_n: Rational,
    pub det_g: Rational,
    pub r: u32,
    pub s: u32,
    pub lambda: Rational,
}

pub fn transform_exponents(degree: usize) -> (u32, u32) {
    match degree {
        2 => (2, 4),
        3 => (6, 8),
        _ => (12, 14),
    }
}

/// Transformation law data relating the covering polynomials of a model and its transform.
pub fn transform_covering(g: &Transformation, model: &GenusOneModel) -> Result<TransformLaw> {
    let gm = g.apply(model)?;
    let det_g = g.det();
    let det_n = mat_det(g.n_matrix());
    let (r, s) = transform_exponents(model.degree());
    let b2 = invariants(model).b2;
    let b2p = invariants(&gm).b2;
    let lambda = -num_traits::pow(det_g.clone(), r as usize) * (b2p - &det_g * &det_g * b2) / c(12);
    Ok(TransformLaw { det_n, det_g, r, s, lambda })
}

pub fn classify_transformation(g: &Transformation, p: u64) -> TransformHypothesis {
    let unit = |q: &Rational| val_rat(q, p).finite() == Some(0);
    let integral = |q: &Rational| val_rat(q, p).finite().map_or(true, |v| v >= 0);
    let mat_int = |m: &Vec<Vec<Rational>>| m.iter().flatten().all(integral) && unit(&mat_det(m));
    let diag = |m: &Vec<Vec<Rational>>| (0..m.len()).all(|i| (0..m.len()).all(|j| i == j || m[i][j].is_zero()));
    let is_integral = match g {
        Transformation::Deg2 { mu, r, n } => unit(mu) && r.iter().all(integral) && mat_int(n),
        Transformation::Deg3 { mu, n } => unit(mu) && mat_int(n),
        Transformation::Deg4 { m, n } => mat_int(m) && mat_int(n),
    };
    if is_integral {
        return TransformHypothesis::Integral;
    }
    let is_diag = match g {
        Transformation::Deg2 { r, n, .. } => r.iter().all(|x| x.is_zero()) && diag(n),
        Transformation::Deg3 { n, .. } => diag(n),
        Transformation::Deg4 { m, n } => diag(m) && diag(n),
    };
    if is_diag && unit(&g.det()) {
        TransformHypothesis::DiagonalUnitDet
    } else {
        TransformHypothesis::Unverifiable
    }
}

/// Maps a point x' of C_{g Phi} to the corresponding point of C_Phi.
pub fn pull_back_point(g: &Transformation, xp: &[Rational]) -> Vec<Rational> {
    let n = g.n_matrix();
    let k = n.len();
    let mut x: Vec<Rational> = (0..k).map(|j| (0..k).fold(Rational::zero(), |a, i| a + &n[i][j] * &xp[i])).collect();
    if let Transformation::Deg2 { mu, r, .. } = g {
        // y = mu^{-1} y' + r(x).
        let rx = &r[0] * &x[0] * &x[0] + &r[1] * &x[0] * &x[1] + &r[2] * &x[1] * &x[1];
        x.push(&xp[2] / mu + rx);
    }
    x
}

/// p-adic absolute-value exponent: v_p(max(|F|,|G|)) = min(v(F), v(G)).
pub fn fg_valuation(f: &Rational, g: &Rational, p: u64) -> Option<i64> {
    match (val_rat(f, p).finite(), val_rat(g, p).finite()) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (Some(a), None) | (None, Some(a)) => Some(a),
        _ => None,
    }
}

pub fn abs_le_one(q: &Rational) -> bool {
    q.abs() <= Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{apply, mat_from_i64};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rnd(rng: &mut ChaCha8Rng, n: usize, b: i64) -> Vec<i64> {
        (0..n).map(|_| rng.gen_range(-b..=b)).collect()
    }

    fn rq(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| c(x)).collect()
    }

    #[test]
    fn deg2_expansions_match_printed_formulas() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let v = rnd(&mut rng, 8, 9);
            let (l, m, n, a, b, cc, d, e) = (v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]);
            let model = GenusOneModel::deg2(&v[..3], &v[3..]);
            let cov = covering_polynomials(&model);
            let f = [l * l + 4 * a, 2 * l * m + 4 * b, 2 * l * n + m * m + 4 * cc, 2 * m * n + 4 * d, n * n + 4 * e];
            let g = [
                -l * l * cc + l * m * b - m * m * a - 4 * a * cc + b * b,
                -2 * l * l * d + 2 * l * n * b - 4 * m * n * a - 8 * a * d,
                -4 * l * l * e - l * m * d + 2 * l * n * cc - m * n * b - 4 * n * n * a - 16 * a * e - 2 * b * d,
                -4 * l * m * e + 2 * l * n * d - 2 * n * n * b - 8 * b * e,
                -m * m * e + m * n * d - n * n * cc - 4 * cc * e + d * d,
            ];
            for i in 0..5 {
                let mono = [4 - i as u8, i as u8, 0, 0];
                assert_eq!(cov.f.coeff(&mono), c(f[i]));
                assert_eq!(cov.g.coeff(&mono), c(g[i]));
            }
        }
    }

    #[test]
    fn deg2_syzygy_holds_symbolically() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let v = rnd(&mut rng, 8, 6);
            let model = GenusOneModel::deg2(&v[..3], &v[3..]);
            let cov = covering_polynomials(&model);
            let i = &cov.invariants;
            let x = cov.part("X").with_nvars(3);
            let f = cov.part("F").with_nvars(3);
            let (y, z) = (cov.part("Y"), cov.part("Z"));
            let eq = &model.equations()[0];
            let lhs = &(&(y * y) + &(&(&x * y) * z).scale(&i.a1)) + &(&(y * z) * &f).scale(&i.a3);
            let rhs = &(&(&x.pow(3) + &(&x.pow(2) * &f).scale(&i.a2)) + &(&x * &f.pow(2)).scale(&i.a4)) + &f.pow(3).scale(&i.a6);
            let corr = &(&x.scale(&i.a1) + &f.scale(&i.a3)).pow(2) * eq;
            assert!((&(&lhs - &rhs) + &corr).is_zero());
            assert!(cov.f.to_integer().is_some() && cov.g.to_integer().is_some());
            assert!(z.to_integer().is_some() && y.to_integer().is_some());
        }
    }

    #[test]
    fn deg3_values_at_a_point() {
        // a = h = 0 so (1:0:0) lies on the cubic.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let mut v = rnd(&mut rng, 10, 5);
            v[0] = 0;
            v[5] = 0;
            let (b, f, j, k, m) = (v[1], v[3], v[7], v[8], v[9]);
            let cov = covering_polynomials(&GenusOneModel::deg3(&v));
            let p = rq(&[1, 0, 0]);
            let (fv, gv) = cov.eval_fg(&p);
            assert_eq!(fv, c(j.pow(4) * k * k));
            assert_eq!(gv, c(b * b * j.pow(6) - b * j.pow(5) * k * m + f * j.pow(5) * k * k));
        }
    }

    #[test]
    fn deg3_syzygy_modulo_cubic_and_integrality() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..3 {
            let v = rnd(&mut rng, 10, 3);
            let model = GenusOneModel::deg3(&v);
            let cov = covering_polynomials(&model);
            let u = &model.forms()[0];
            let i = &cov.invariants;
            assert_eq!(cov.f, cov.part("Z").pow(2));
            let (x, y, z) = (cov.part("X"), cov.part("Y"), cov.part("Z"));
            for name in ["Z", "X", "Y"] {
                assert!(cov.part(name).to_integer().is_some(), "{name} not integral");
            }
            let lhs = &(&(y * y) + &(&(x * y) * z).scale(&i.a1)) + &(y * &z.pow(3)).scale(&i.a3);
            let rhs = &(&(&x.pow(3) + &(&x.pow(2) * &z.pow(2)).scale(&i.a2)) + &(x * &z.pow(4)).scale(&i.a4))
                + &z.pow(6).scale(&i.a6);
            assert!((&lhs - &rhs).div_exact(u).is_ok());
        }
    }

    fn model_with_coordinate_points(rng: &mut ChaCha8Rng) -> GenusOneModel {
        let mut a = rnd(rng, 10, 4);
        let mut b = rnd(rng, 10, 4);
        for i in 0..4 {
            a[sym_index(i, i)] = 0;
            b[sym_index(i, i)] = 0;
        }
        GenusOneModel::deg4(&a, &b)
    }

    #[test]
    fn deg4_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..3 {
            let model = model_with_coordinate_points(&mut rng);
            let cov = covering_polynomials(&model);
            for name in ["T1", "T2", "Y"] {
                assert!(cov.part(name).to_integer().is_some());
            }
            let (pf, rd) = (cov.part("pf"), cov.part("rd"));
            let e = covering_curve(&model);
            for k in 0..4 {
                let mut p = vec![c(0); 4];
                p[k] = c(1);
                let t1 = cov.part("T1").eval(&p);
                let t2 = cov.part("T2").eval(&p);
                let y = cov.part("Y").eval(&p);
                let (tx, tz) = (t1.clone(), -t2.clone());
                let pv = pf.eval(&[tx.clone(), tz.clone()]);
                let qv = rd.eval(&[tx, tz]);
                assert!((&y * &y + pv * &y - qv).is_zero());
                if let Ok(CurvePoint::Affine { x, y }) = evaluate_covering(&model, &p) {
                    assert!(e.contains(&x, &y));
                }
            }
        }
    }

    #[test]
    fn deg4_t_values_at_a_point() {
        // Q1 = lam x1 x3 + q1(x2,x3,x4), Q2 = mu x1 x4 + q2(x2,x3,x4).
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..4 {
            let mut a = rnd(&mut rng, 10, 4);
            let mut b = rnd(&mut rng, 10, 4);
            let (lam, mu) = (rng.gen_range(1..4), rng.gen_range(1..4));
            for k in [sym_index(0, 0), sym_index(0, 1), sym_index(0, 2), sym_index(0, 3)] {
                a[k] = 0;
                b[k] = 0;
            }
            a[sym_index(0, 2)] = lam;
            b[sym_index(0, 3)] = mu;
            let cov = covering_polynomials(&GenusOneModel::deg4(&a, &b));
            let p = rq(&[1, 0, 0, 0]);
            let s = lam * lam * mu * mu;
            assert_eq!(cov.part("T1").eval(&p), c(s * b[sym_index(1, 1)]));
            assert_eq!(cov.part("T2").eval(&p), c(s * a[sym_index(1, 1)]));
        }
    }

    #[test]
    fn base_locus_examples() {
        // y^2 = x^3 z: cusp at (0:1:0).
        let cusp = GenusOneModel::deg2(&[0, 0, 0], &[0, 1, 0, 0, 0]);
        assert!(base_locus_test(&cusp, &rq(&[0, 1, 0])));
        let tri = GenusOneModel::deg3(&[0, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
        assert!(base_locus_test(&tri, &rq(&[0, 1, 1])));
        let m = GenusOneModel::deg2(&[0, 0, 0], &[1, 0, 0, 0, 1]);
        assert!(!base_locus_test(&m, &rq(&[1, 0, 1])));
        assert!(matches!(evaluate_covering(&cusp, &rq(&[0, 1, 0])), Err(Error::Domain(_))));
        assert!(matches!(evaluate_covering(&m, &rq(&[1, 1, 0])), Err(Error::Input(_))));
    }

    #[test]
    fn transformation_law_on_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n4 = mat_from_i64(&[&[1, 2, 0, -1], &[0, 1, 3, 1], &[0, 0, 1, 2], &[1, 0, 0, 1]]);
        let m2 = mat_from_i64(&[&[2, 1], &[1, 1]]);
        for _ in 0..2 {
            let model = model_with_coordinate_points(&mut rng);
            if !crate::models::is_nonsingular(&model) {
                continue;
            }
            let g = Transformation::Deg4 { m: m2.clone(), n: n4.clone() };
            let gm = apply(&g, &model).unwrap();
            let law = transform_covering(&g, &model).unwrap();
            let cov = covering_polynomials(&model);
            let covp = covering_polynomials(&gm);
            let ninv = crate::models::mat_inverse(&n4).unwrap();
            for k in 0..4 {
                let mut x = vec![c(0); 4];
                x[k] = c(1);
                // x = x' N, so x' = x N^{-1}.
                let xp: Vec<Rational> =
                    (0..4).map(|i| (0..4).fold(c(0), |acc, j| acc + &x[j] * &ninv[j][i])).collect();
                assert!(gm.contains(&xp));
                assert_eq!(pull_back_point(&g, &xp), x);
                let (f, gv) = cov.eval_fg(&x);
                let (fp, gp) = covp.eval_fg(&xp);
                let dn2 = &law.det_n * &law.det_n;
                assert_eq!(&fp * &dn2, num_traits::pow(law.det_g.clone(), law.r as usize) * &f);
                assert_eq!(&gp * &dn2, &law.lambda * &f + num_traits::pow(law.det_g.clone(), law.s as usize) * &gv);
            }
            assert_eq!(classify_transformation(&g, 5), TransformHypothesis::Integral);
        }
    }

    #[test]
    fn normalize_points() {
        let p = normalize_point(3, &[rat(1, 2), rat(3, 4), c(0)]).unwrap();
        assert_eq!(p, vec![BigInt::from(2), BigInt::from(3), BigInt::from(0)]);
        let q = normalize_point(2, &[rat(1, 2), rat(1, 3), rat(5, 36)]).unwrap();
        assert_eq!(q, vec![BigInt::from(3), BigInt::from(2), BigInt::from(5)]);
    }
}
