//! Explicit height bounds for n-coverings: minimal Weierstrass models, the shift relating the
//! minimal equation to the model's a-invariant equation, the bounds B1 <= h(P) - h_E(pi P)/(2n) <= B2,
//! per-point reports and rational point searches.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::covering::{covering_curve, covering_polynomials, evaluate_with, fg_valuation, normalize_point, CurvePoint};
use crate::error::{Error, Result};
use crate::exactmath::rational::{
    exact_cbrt, factor_integer, format_rational, ln_big, rat, rational_sqrt, val_int, Rational,
};
use crate::models::{invariants, is_nonsingular, GenusOneModel, WeierstrassCurve};
use crate::realplace::{delta_epsilon_real, RealBounds};
use crate::tamagawa::{tamagawa_distances, TamagawaDistances};

// ---------------------------------------------------------------------------
// Weierstrass models

/// Kraus's conditions for integers c4, c6 to be the invariants of an integral Weierstrass model.
pub fn kraus_conditions(c4: &BigInt, c6: &BigInt) -> bool {
    let disc12 = c4 * c4 * c4 - c6 * c6;
    if disc12.is_zero() || !(&disc12 % BigInt::from(1728)).is_zero() {
        return false;
    }
    kraus_at_3(c6) && kraus_at_2(c4, c6)
}

fn kraus_at_3(c6: &BigInt) -> bool {
    val_int(c6, 3) != Some(2)
}

fn kraus_at_2(c4: &BigInt, c6: &BigInt) -> bool {
    let m4 = c6.mod_floor(&BigInt::from(4));
    if m4 == BigInt::from(3) {
        return true;
    }
    let v4 = val_int(c4, 2).unwrap_or(i64::MAX);
    let m32 = c6.mod_floor(&BigInt::from(32));
    v4 >= 4 && (m32.is_zero() || m32 == BigInt::from(8))
}

/// The integral Weierstrass model with invariants (c4, c6), normalized so that a1, a3 lie in
/// {0, 1} and a2 in {-1, 0, 1}.
pub fn curve_from_c4c6(c4: &BigInt, c6: &BigInt) -> Result<WeierstrassCurve> {
    if !kraus_conditions(c4, c6) {
        return Err(Error::Input("c4, c6 fail Kraus's conditions".into()));
    }
    let twelve = BigInt::from(12);
    let mut b2 = (-c6).mod_floor(&twelve);
    if b2 > BigInt::from(6) {
        b2 -= &twelve;
    }
    let b4n = &b2 * &b2 - c4;
    if !(&b4n % BigInt::from(24)).is_zero() {
        return Err(Error::Input("c4, c6 do not come from an integral model".into()));
    }
    let b4: BigInt = b4n / 24;
    let b6n: BigInt = -(&b2 * &b2 * &b2) + BigInt::from(36) * &b2 * &b4 - c6;
    if !(&b6n % BigInt::from(216)).is_zero() {
        return Err(Error::Input("c4, c6 do not come from an integral model".into()));
    }
    let b6: BigInt = b6n / 216;
    let a1 = b2.mod_floor(&BigInt::from(2));
    let a3 = b6.mod_floor(&BigInt::from(2));
    let a2 = (&b2 - &a1) / 4;
    let a4 = (&b4 - &a1 * &a3) / 2;
    let a6 = (&b6 - &a3) / 4;
    let q = |x: &BigInt| Rational::from_integer(x.clone());
    let e = WeierstrassCurve::new([q(&a1), q(&a2), q(&a3), q(&a4), q(&a6)]);
    let (ec4, ec6) = (e.c4(), e.c6());
    if ec4 != q(c4) || ec6 != q(c6) {
        return Err(Error::Input("c4, c6 do not come from an integral model".into()));
    }
    Ok(e)
}

/// The global minimal model of the curve with invariants (c4, c6), and the scaling u with
/// c4 = u^4 c4_min and c6 = u^6 c6_min.
pub fn minimal_weierstrass(c4: &Rational, c6: &Rational) -> Result<(WeierstrassCurve, Rational)> {
    let disc12 = c4 * c4 * c4 - c6 * c6;
    if disc12.is_zero() {
        return Err(Error::Input("c4^3 = c6^2: singular curve".into()));
    }
    let den = c4.denom().lcm(c6.denom());
    let mut u = Rational::new(BigInt::one(), den.clone());
    let d4 = num_traits::pow(den.clone(), 4);
    let d6 = num_traits::pow(den.clone(), 6);
    let mut a = (c4 * Rational::from_integer(d4)).to_integer();
    let mut b = (c6 * Rational::from_integer(d6)).to_integer();
    let g = a.gcd(&b);
    let mut primes: Vec<BigInt> = factor_integer(&g).into_iter().map(|(p, _)| p).collect();
    for s in [2, 3] {
        let sp = BigInt::from(s);
        if !primes.contains(&sp) {
            primes.push(sp);
        }
    }
    for p in primes {
        let p64 = p.to_u64().ok_or_else(|| Error::Input("prime too large".into()))?;
        let va = if a.is_zero() { i64::MAX } else { val_int(&a, p64).unwrap_or(0) };
        let vb = if b.is_zero() { i64::MAX } else { val_int(&b, p64).unwrap_or(0) };
        let dmax = (va / 4).min(vb / 6);
        let mut chosen = None;
        for d in (-1..=dmax).rev() {
            let (sa, sb) = scale_pair(&a, &b, &p, d);
            let ok = match p64 {
                2 | 3 if !(sa.is_integer() && sb.is_integer()) => false,
                2 => {
                    let (x, y) = (sa.to_integer(), sb.to_integer());
                    kraus_at_2(&x, &y) && disc_divisible(&x, &y, 64)
                }
                3 => {
                    let (x, y) = (sa.to_integer(), sb.to_integer());
                    kraus_at_3(&y) && disc_divisible(&x, &y, 27)
                }
                _ => true,
            };
            if ok {
                chosen = Some((d, sa.to_integer(), sb.to_integer()));
                break;
            }
        }
        let (d, na, nb) = chosen.ok_or_else(|| Error::Input("c4, c6 fail Kraus's conditions".into()))?;
        a = na;
        b = nb;
        u *= num_traits::pow(Rational::from_integer(p.clone()), d.max(0) as usize);
        if d < 0 {
            u /= Rational::from_integer(p.clone());
        }
    }
    Ok((curve_from_c4c6(&a, &b)?, u))
}

fn disc_divisible(c4: &BigInt, c6: &BigInt, m: i64) -> bool {
    ((c4 * c4 * c4 - c6 * c6) % BigInt::from(m)).is_zero()
}

fn scale_pair(a: &BigInt, b: &BigInt, p: &BigInt, d: i64) -> (Rational, Rational) {
    let pr = Rational::from_integer(p.clone());
    let f4 = if d >= 0 { num_traits::pow(pr.clone(), 4 * d as usize) } else { num_traits::pow(pr.clone(), 4).recip() };
    let f6 = if d >= 0 { num_traits::pow(pr.clone(), 6 * d as usize) } else { num_traits::pow(pr, 6).recip() };
    (Rational::from_integer(a.clone()) / f4, Rational::from_integer(b.clone()) / f6)
}

/// The substitution x = u^2 x' + r, y = u^3 y' + s u^2 x' + t taking `from` to `to`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeierstrassIso {
    #[serde(serialize_with = "crate::models::ser_rat::serialize")]
    pub u: Rational,
    #[serde(serialize_with = "crate::models::ser_rat::serialize")]
    pub r: Rational,
    #[serde(serialize_with = "crate::models::ser_rat::serialize")]
    pub s: Rational,
    #[serde(serialize_with = "crate::models::ser_rat::serialize")]
    pub t: Rational,
}

impl WeierstrassIso {
    pub fn apply(&self, e: &WeierstrassCurve) -> WeierstrassCurve {
        let [a1, a2, a3, a4, a6] = &e.a;
        let (u, r, s, t) = (&self.u, &self.r, &self.s, &self.t);
        let two = rat(2, 1);
        let three = rat(3, 1);
        let n1 = a1 + &two * s;
        let n2 = a2 - s * a1 + &three * r - s * s;
        let n3 = a3 + r * a1 + &two * t;
        let n4 = a4 - s * a3 + &two * r * a2 - (t + r * s) * a1 + &three * r * r - &two * s * t;
        let n6 = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1;
        let up = |k: usize| num_traits::pow(u.clone(), k);
        WeierstrassCurve::new([n1 / up(1), n2 / up(2), n3 / up(3), n4 / up(4), n6 / up(6)])
    }

    /// x-coordinate on the source curve of a point with x-coordinate x' on the target.
    pub fn x_back(&self, x: &Rational) -> Rational {
        &self.u * &self.u * x + &self.r
    }
}

fn rational_cbrt(q: &Rational) -> Option<Rational> {
    let n = exact_cbrt(q.numer())?;
    let d = exact_cbrt(q.denom())?;
    Some(Rational::new(n, d))
}

pub fn weierstrass_shift(from: &WeierstrassCurve, to: &WeierstrassCurve) -> Result<WeierstrassIso> {
    let (c4, c6) = (from.c4(), from.c6());
    let (d4, d6) = (to.c4(), to.c6());
    let not_iso = || Error::Input("the curves are not isomorphic over Q".into());
    if from.disc().is_zero() || to.disc().is_zero() {
        return Err(Error::Input("singular curve".into()));
    }
    if c4.is_zero() != d4.is_zero() || c6.is_zero() != d6.is_zero() {
        return Err(not_iso());
    }
    let u2 = if !c4.is_zero() && !c6.is_zero() {
        let v = (&c6 / &d6) / (&c4 / &d4);
        if num_traits::pow(v.clone(), 2) != &c4 / &d4 {
            return Err(not_iso());
        }
        v
    } else if c4.is_zero() {
        rational_cbrt(&(&c6 / &d6)).ok_or_else(not_iso)?
    } else {
        rational_sqrt(&(&c4 / &d4)).ok_or_else(not_iso)?
    };
    let u = rational_sqrt(&u2).ok_or_else(not_iso)?;
    let [a1, a2, a3, ..] = &from.a;
    let [b1, b2, b3, ..] = &to.a;
    for uu in [u.clone(), -u] {
        let s = (&uu * b1 - a1) / rat(2, 1);
        let r = (&uu * &uu * b2 - a2 + &s * a1 + &s * &s) / rat(3, 1);
        let t = (num_traits::pow(uu.clone(), 3) * b3 - a3 - &r * a1) / rat(2, 1);
        let iso = WeierstrassIso { u: uu, r, s, t };
        if &iso.apply(from) == to {
            return Ok(iso);
        }
    }
    Err(not_iso())
}

// ---------------------------------------------------------------------------
// Naive heights

/// log max |x_i| over primitive integer coordinates (x1, x2 only for degree 2).
pub fn naive_height(degree: usize, point: &[Rational]) -> Result<f64> {
    let v = normalize_point(degree, point)?;
    let xs = if degree == 2 { &v[..2] } else { &v[..] };
    let m = xs.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero);
    Ok(if m.is_zero() { 0.0 } else { ln_big(&m) })
}

/// The x-coordinate height log max(|numerator|, |denominator|); 0 at infinity.
pub fn naive_height_x(p: &CurvePoint) -> f64 {
    match p {
        CurvePoint::Infinity => 0.0,
        CurvePoint::Affine { x, .. } => ln_big(&x.numer().abs().max(x.denom().abs())),
    }
}

// ---------------------------------------------------------------------------
// Height bounds

#[derive(Clone, Debug, Default)]
pub struct HeightOptions {
    /// Primes whose contribution is left out of the sum.
    pub ignore_primes: Vec<u64>,
    pub digits: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeightBoundReport {
    pub degree: usize,
    pub e_min: String,
    pub shift: WeierstrassIso,
    pub primes: Vec<TamagawaDistances>,
    pub ignored_primes: Vec<u64>,
    pub real: RealBounds,
    pub b1: f64,
    pub b2: f64,
}

impl HeightBoundReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }

    pub fn distances(&self, p: u64) -> Option<&TamagawaDistances> {
        self.primes.iter().find(|a| a.p == p)
    }
}

/// Primes p with p^2 dividing the discriminant.
pub fn square_primes(disc: &BigInt) -> Vec<u64> {
    factor_integer(disc).into_iter().filter(|(_, e)| *e >= 2).filter_map(|(p, _)| p.to_u64()).collect()
}

/// The shift of the minimal equation to the a-invariant equation of the model.
pub fn model_shift(model: &GenusOneModel, e_min: &WeierstrassCurve) -> Result<WeierstrassIso> {
    let iso = weierstrass_shift(e_min, &covering_curve(model))?;
    if iso.u.abs() != Rational::one() {
        return Err(Error::Domain("the model's Jacobian equation is not a unit change of the minimal equation".into()));
    }
    Ok(iso)
}

pub fn height_bounds(model: &GenusOneModel, e_min: &WeierstrassCurve, opts: &HeightOptions) -> Result<HeightBoundReport> {
    if !is_nonsingular(model) {
        return Err(Error::Domain("singular model".into()));
    }
    if !model.is_integral() {
        return Err(Error::Input("the model is not integral".into()));
    }
    let disc_e = e_min.disc();
    if invariants(model).disc != disc_e {
        return Err(Error::Domain("level error: the model's discriminant differs from the minimal discriminant".into()));
    }
    let shift = model_shift(model, e_min)?;
    let n = model.degree();
    let primes: Vec<u64> =
        square_primes(&disc_e.to_integer()).into_iter().filter(|p| !opts.ignore_primes.contains(p)).collect();
    let digits = if opts.digits == 0 { 6 } else { opts.digits };
    let (real, dists) = std::thread::scope(|s| {
        let real = s.spawn(|| delta_epsilon_real(model, &shift.r, digits));
        let dists: Vec<Result<TamagawaDistances>> =
            primes.iter().map(|&p| tamagawa_distances(model, p, crate::redgeom::Chart::Full)).collect();
        (real.join().unwrap_or_else(|_| Err(Error::Precision("real-place computation panicked".into()))), dists)
    });
    let real = real?;
    let dists: Vec<TamagawaDistances> = dists.into_iter().collect::<Result<_>>()?;
    let nf = n as f64;
    let mut b1 = -real.delta_inf.ln() / (2.0 * nf);
    let mut b2 = -real.epsilon_inf.ln() / (2.0 * nf);
    for a in &dists {
        let (lo, hi) = match (a.min(), a.max()) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => return Err(Error::Domain(format!("the model is insoluble at {}", a.p))),
        };
        let lp = (a.p as f64).ln();
        b1 += lo as f64 * lp / nf;
        b2 += hi as f64 * lp / nf;
    }
    Ok(HeightBoundReport {
        degree: n,
        e_min: e_min.to_string(),
        shift,
        primes: dists,
        ignored_primes: opts.ignore_primes.clone(),
        real,
        b1,
        b2,
    })
}

/// The range exp(B1 + (h + lo)/(2n)) <= H <= exp(B2 + (h + hi)/(2n)) of naive heights of a preimage
/// of a point with canonical height h, where lo <= h_E - canonical height <= hi.
pub fn search_window(canonical: f64, lo: f64, hi: f64, b1: f64, b2: f64, degree: usize) -> (f64, f64) {
    let two_n = 2.0 * degree as f64;
    ((b1 + (canonical + lo) / two_n).exp(), (b2 + (canonical + hi) / two_n).exp())
}

/// Lower bound 2n(-B2) - hi for the canonical height of any image point, from h(P) >= 0.
pub fn generator_lower_bound(b2: f64, hi: f64, degree: usize) -> f64 {
    2.0 * degree as f64 * (-b2) - hi
}

#[derive(Clone, Debug, Serialize)]
pub struct PointReport {
    pub point: Vec<String>,
    pub image_x: Option<String>,
    pub image_y: Option<String>,
    pub height: f64,
    pub height_e: f64,
    pub difference: f64,
    /// (p, alpha) with max(|F|_p, |G|_p) = p^(-2 alpha) at primitive coordinates.
    pub contributions: Vec<(u64, i64)>,
}

impl PointReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }

    pub fn contribution(&self, p: u64) -> Option<i64> {
        self.contributions.iter().find(|(q, _)| *q == p).map(|(_, a)| *a)
    }
}

pub fn point_report(model: &GenusOneModel, point: &[Rational], report: &HeightBoundReport) -> Result<PointReport> {
    let n = model.degree();
    let prim = normalize_point(n, point)?;
    let q: Vec<Rational> = prim.iter().map(|x| Rational::from_integer(x.clone())).collect();
    if !model.contains(&q) {
        return Err(Error::Input("point does not lie on the model".into()));
    }
    let cov = covering_polynomials(model);
    let image = evaluate_with(&cov, model, &q)?;
    let image_min = match &image {
        CurvePoint::Infinity => CurvePoint::Infinity,
        CurvePoint::Affine { x, y } => CurvePoint::Affine { x: report.shift.x_back(x), y: y.clone() },
    };
    let height = naive_height(n, &q)?;
    let height_e = naive_height_x(&image_min);
    let (fv, gv) = cov.eval_fg(&q);
    let mut contributions = Vec::new();
    for a in &report.primes {
        let v = fg_valuation(&fv, &gv, a.p).ok_or_else(|| Error::Domain("F and G vanish at the point".into()))?;
        contributions.push((a.p, v / 2));
    }
    let (image_x, image_y) = match &image_min {
        CurvePoint::Infinity => (None, None),
        CurvePoint::Affine { x, y } => (Some(format_rational(x)), Some(format_rational(y))),
    };
    Ok(PointReport {
        point: prim.iter().map(|x| x.to_string()).collect(),
        image_x,
        image_y,
        height,
        height_e,
        difference: height - height_e / (2.0 * n as f64),
        contributions,
    })
}

mod search;
pub use search::search_points;

#[cfg(test)]
mod tests;
