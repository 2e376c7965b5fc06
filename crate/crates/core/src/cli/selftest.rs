//! The acceptance suite: published-number reproductions on the shipped fixtures and randomized
//! property checks with fixed seeds.

use std::path::Path;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{load_curve, load_model, read_json};
use crate::covering::{
    classify_transformation, covering_curve, covering_polynomials, evaluate_covering, fg_valuation, pull_back_point,
    CurvePoint, TransformHypothesis,
};
use crate::exactmath::rational::{factor_integer, rat, val_rat, Rational};
use crate::exactmath::QPoly;
use crate::heights::{
    generator_lower_bound, height_bounds, naive_height, point_report, search_points, search_window, HeightBoundReport,
    HeightOptions,
};
use crate::localsolve::{brute_force_soluble, is_soluble, BruteForce};
use crate::models::{apply, invariants, is_nonsingular, mat_det, mat_inverse, sym_index, GenusOneModel, Mat, Transformation};
use crate::realplace::audit;
use crate::redgeom::Chart;
use crate::tamagawa::{distance_bound, tamagawa_distances};

/// Tolerance for printed five-decimal values.
const TOL: f64 = 1e-4;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<28} {} ({:.1} s) {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.detail
        )
    }

    pub fn to_json(&self) -> Value {
        json!({"id": self.id, "name": self.name, "passed": self.passed, "detail": self.detail, "seconds": self.seconds})
    }
}

type Check = fn(&Path) -> std::result::Result<String, String>;

pub const CRITERIA: [(u32, &str, Check); 10] = [
    (1, "invariant-normalization", normalization),
    (2, "tamagawa-tables", tamagawa_tables),
    (3, "height-bounds-rank-two", rank_two_bounds),
    (4, "point-table", point_table),
    (5, "mordell-curve", mordell_curve),
    (6, "twists", twists),
    (7, "solubility-oracle", solubility_oracle),
    (8, "covariance-syzygies", covariance_syzygies),
    (9, "tamagawa-distance-bounds", distance_bounds),
    (10, "real-place-audit", real_audit),
];

/// Runs every criterion whose name contains `filter`.
pub fn run(data: &Path, filter: Option<&str>) -> Vec<Outcome> {
    CRITERIA
        .iter()
        .filter(|(_, name, _)| filter.map_or(true, |f| name.contains(f)))
        .map(|&(id, name, check)| {
            let t = Instant::now();
            let res = std::panic::catch_unwind(|| check(data)).unwrap_or_else(|e| {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                Err(format!("panicked: {msg}"))
            });
            let (passed, detail) = match res {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            Outcome { id, name, passed, detail, seconds: t.elapsed().as_secs_f64() }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Fixture access

type Res<T> = std::result::Result<T, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Res<()> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn expected(data: &Path) -> Res<Value> {
    read_json(&data.join("expected.json")).map_err(|e| e.to_string())
}

fn model(data: &Path, name: &str) -> Res<GenusOneModel> {
    load_model(&data.join("models").join(format!("{name}.json"))).map_err(|e| e.to_string())
}

fn curve(data: &Path, name: &str) -> Res<crate::models::WeierstrassCurve> {
    load_curve(&data.join("curves").join(format!("{name}.json"))).map_err(|e| e.to_string())
}

fn field<'a>(v: &'a Value, key: &str) -> Res<&'a Value> {
    v.get(key).ok_or_else(|| format!("fixture lacks '{key}'"))
}

fn str_field(v: &Value, key: &str) -> Res<String> {
    field(v, key)?.as_str().map(String::from).ok_or_else(|| format!("'{key}' is not a string"))
}

fn f64_field(v: &Value, key: &str) -> Res<f64> {
    field(v, key)?.as_f64().ok_or_else(|| format!("'{key}' is not a number"))
}

fn array<'a>(v: &'a Value, key: &str) -> Res<&'a Vec<Value>> {
    field(v, key)?.as_array().ok_or_else(|| format!("'{key}' is not an array"))
}

fn f64_pair(v: &Value, key: &str) -> Res<(f64, f64)> {
    let a = array(v, key)?;
    match (a.first().and_then(Value::as_f64), a.get(1).and_then(Value::as_f64)) {
        (Some(x), Some(y)) => Ok((x, y)),
        _ => Err(format!("'{key}' is not a pair of numbers")),
    }
}

fn u32_list(v: &Value) -> Res<Vec<u32>> {
    v.as_array()
        .ok_or("expected an array")?
        .iter()
        .map(|x| x.as_u64().map(|x| x as u32).ok_or_else(|| "expected integers".to_string()))
        .collect()
}

fn u64_list(v: &Value) -> Res<Vec<u64>> {
    Ok(u32_list(v)?.into_iter().map(u64::from).collect())
}

fn point_field(v: &Value, key: &str) -> Res<Vec<Rational>> {
    array(v, key)?
        .iter()
        .map(|x| {
            x.as_i64().map(|i| rat(i, 1)).ok_or_else(|| format!("'{key}' entries must be integers"))
        })
        .collect()
}

fn err<E: std::fmt::Display>(ctx: &str) -> impl FnOnce(E) -> String + '_ {
    move |e| format!("{ctx}: {e}")
}

fn distances_match(m: &GenusOneModel, name: &str, table: &Value) -> Res<usize> {
    let obj = table.as_object().ok_or("distances must be an object")?;
    for (p, want) in obj {
        let p: u64 = p.parse().map_err(|_| format!("bad prime key {p}"))?;
        let want = u32_list(want)?;
        let got = tamagawa_distances(m, p, Chart::Full).map_err(err(name))?.distances;
        ensure(got == want, || format!("{name}: A_{p} = {got:?}, expected {want:?}"))?;
    }
    Ok(obj.len())
}

fn bounds_for(data: &Path, entry: &Value, curve_name: &str, ignore: &[u64]) -> Res<HeightBoundReport> {
    let name = str_field(entry, "model")?;
    let m = model(data, &name)?;
    let e = curve(data, curve_name)?;
    height_bounds(&m, &e, &HeightOptions { ignore_primes: ignore.to_vec(), digits: 10 }).map_err(err(&name))
}

fn bounds_match(name: &str, rep: &HeightBoundReport, want: (f64, f64)) -> Res<()> {
    ensure((rep.b1 - want.0).abs() <= TOL && (rep.b2 - want.1).abs() <= TOL, || {
        format!("{name}: (B1, B2) = ({:.6}, {:.6}), expected ({}, {})", rep.b1, rep.b2, want.0, want.1)
    })
}

// ---------------------------------------------------------------------------
// 1-6: published numbers

fn normalization(data: &Path) -> Res<String> {
    let exp = expected(data)?;
    let names = array(&exp, "normalization")?;
    for n in names {
        let n = n.as_str().ok_or("model names must be strings")?;
        let inv = invariants(&model(data, n)?);
        ensure(inv.c4 == rat(1, 1) && inv.c6 == rat(-1, 1), || format!("{n}: c4 = {}, c6 = {}", inv.c4, inv.c6))?;
    }
    Ok(format!("{} reference models give c4 = 1, c6 = -1", names.len()))
}

fn tamagawa_tables(data: &Path) -> Res<String> {
    let exp = expected(data)?;
    let sec = field(&exp, "rank_two")?;
    let cp = field(sec, "tamagawa_numbers")?.as_object().ok_or("tamagawa_numbers must be an object")?;
    let mut count = 0;
    for entry in array(sec, "models")? {
        let name = str_field(entry, "model")?;
        let m = model(data, &name)?;
        let table = field(entry, "distances")?;
        count += distances_match(&m, &name, table)?;
        for (p, c) in cp {
            let size = table.get(p).and_then(Value::as_array).map(Vec::len);
            ensure(size == c.as_u64().map(|c| c as usize), || format!("{name}: |A_{p}| differs from c_{p}"))?;
        }
    }
    Ok(format!("{count} multisets match"))
}

fn rank_two_bounds(data: &Path) -> Res<String> {
    let exp = expected(data)?;
    let sec = field(&exp, "rank_two")?;
    let cname = str_field(sec, "curve")?;
    let mut out = Vec::new();
    for entry in array(sec, "models")? {
        let name = str_field(entry, "model")?;
        let t = Instant::now();
        let rep = bounds_for(data, entry, &cname, &[])?;
        ensure(t.elapsed().as_secs_f64() < 60.0, || format!("{name}: bounds took {:?}", t.elapsed()))?;
        bounds_match(&name, &rep, f64_pair(entry, "bounds")?)?;
        out.push(format!("({:.5}, {:.5})", rep.b1, rep.b2));
    }
    Ok(out.join(" "))
}

fn point_table(data: &Path) -> Res<String> {
    let exp = expected(data)?;
    let sec = field(&exp, "rank_two")?;
    let cname = str_field(sec, "curve")?;
    let primes = u64_list(field(sec, "table_primes")?)?;
    let mut rows = 0;
    for entry in array(sec, "models")? {
        let name = str_field(entry, "model")?;
        let m = model(data, &name)?;
        let rep = bounds_for(data, entry, &cname, &[])?;
        for row in array(entry, "points")? {
            let pt = point_field(row, "point")?;
            let want = u32_list(field(row, "contributions")?)?;
            let pr = point_report(&m, &pt, &rep).map_err(err(&name))?;
            let got: Vec<u32> = primes.iter().map(|&p| pr.contribution(p).unwrap_or(0) as u32).collect();
            ensure(got == want, || format!("{name} {:?}: contributions {got:?}, expected {want:?}", pr.point))?;
            for (&p, &a) in primes.iter().zip(&got) {
                let inside = rep.distances(p).map_or(a == 0, |d| d.distances.contains(&a));
                ensure(inside, || format!("{name} {:?}: contribution {a} not in A_{p}", pr.point))?;
            }
            let d = f64_field(row, "difference")?;
            ensure((pr.difference - d).abs() <= TOL, || format!("{name} {:?}: difference {:.6}, expected {d}", pr.point, pr.difference))?;
            ensure(rep.b1 <= pr.difference && pr.difference <= rep.b2, || format!("{name} {:?}: outside [B1, B2]", pr.point))?;
            rows += 1;
        }
    }
    Ok(format!("{rows} rows match"))
}

fn mordell_curve(data: &Path) -> Res<String> {
    let exp = expected(data)?;
    let sec = field(&exp, "mordell")?;
    let cname = str_field(sec, "curve")?;
    let hhat = f64_field(sec, "canonical_height")?;
    let (lo, hi) = f64_pair(sec, "height_difference_bounds")?;
    let mut notes = Vec::new();
    for entry in array(sec, "models")? {
        let name = str_field(entry, "model")?;
        let m = model(data, &name)?;
        let rep = bounds_for(data, entry, &cname, &[])?;
        for a in &rep.primes {
            ensure(a.distances == vec![0], || format!("{name}: A_{} = {:?}", a.p, a.distances))?;
        }
        ensure(rep.primes.iter().map(|a| a.p).collect::<Vec<_>>() == vec![2, 3, 7823], || format!("{name}: primes"))?;
        bounds_match(&name, &rep, f64_pair(entry, "bounds")?)?;
        let (wlo, whi) = search_window(hhat, lo, hi, rep.b1, rep.b2, m.degree());
        let (elo, ehi) = f64_pair(entry, "window")?;
        ensure(wlo.ceil() >= elo - 1e-3 * elo && wlo.ceil() <= elo + 1e-3 * elo && (whi.floor() - ehi).abs() <= 1e-3 * ehi, || {
            format!("{name}: window [{wlo:.2}, {whi:.2}], expected [{elo}, {ehi}]")
        })?;
        let pt = point_field(entry, "point")?;
        let h = naive_height(m.degree(), &pt).map_err(err(&name))?;
        ensure(wlo.ln() <= h && h <= whi.ln(), || format!("{name}: the known point lies outside the window"))?;
        let pr = point_report(&m, &pt, &rep).map_err(err(&name))?;
        ensure(rep.b1 <= pr.difference && pr.difference <= rep.b2, || format!("{name}: known point outside [B1, B2]"))?;
        if let Some(cap) = entry.get("search_height").and_then(Value::as_u64) {
            let found = search_points(&m, cap).map_err(err(&name))?;
            let want: Vec<BigInt> = pt.iter().map(|q| q.to_integer()).collect();
            ensure(found.contains(&want), || format!("{name}: search to {cap} misses {want:?}"))?;
            for p in &found {
                let q: Vec<Rational> = p.iter().map(|x| Rational::from_integer(x.clone())).collect();
                let d = point_report(&m, &q, &rep).map_err(err(&name))?.difference;
                ensure(rep.b1 <= d && d <= rep.b2, || format!("{name}: found point {p:?} outside [B1, B2]"))?;
            }
            notes.push(format!("search to {cap}: {} point(s)", found.len()));
        }
        notes.push(format!("{}: [{:.0}, {:.0}]", name, wlo.ceil(), whi.floor()));
    }
    Ok(notes.join("; "))
}

fn twists(data: &Path) -> Res<String> {
    let exp = expected(data)?;
    let sec = field(&exp, "twists")?;
    let cname = str_field(sec, "curve")?;
    let ignore = u64_list(field(sec, "ignore_for_lifts")?)?;
    let (_, hd_hi) = f64_pair(sec, "height_difference_bounds")?;
    let mut notes = Vec::new();
    let mut first_b2 = None;
    for (i, entry) in array(sec, "models")?.iter().enumerate() {
        let name = str_field(entry, "model")?;
        let m = model(data, &name)?;
        distances_match(&m, &name, field(entry, "distances")?)?;
        let ign: &[u64] = if i == 0 { &[] } else { &ignore };
        let rep = bounds_for(data, entry, &cname, ign)?;
        bounds_match(&name, &rep, f64_pair(entry, "bounds")?)?;
        if i == 1 {
            first_b2 = Some(rep.b2);
        }
        if let Some(cap) = entry.get("search_height").and_then(Value::as_u64) {
            let pt = point_field(entry, "point")?;
            let want: Vec<BigInt> = pt.iter().map(|q| q.to_integer()).collect();
            let found = search_points(&m, cap).map_err(err(&name))?;
            ensure(found.contains(&want), || format!("{name}: search to {cap} misses {want:?}"))?;
            let h = naive_height(4, &pt).map_err(err(&name))?;
            let eh = f64_field(entry, "height")?;
            ensure((h - eh).abs() <= TOL, || format!("{name}: h = {h:.6}, expected {eh}"))?;
            let d = point_report(&m, &pt, &rep).map_err(err(&name))?.difference;
            ensure(rep.b1 <= d && d <= rep.b2, || format!("{name}: point outside [B1, B2]"))?;
            notes.push(format!("{name}: found h = {h:.5}"));
        }
    }
    let b2 = first_b2.ok_or("the twist section needs at least two models")?;
    let g = generator_lower_bound(b2, hd_hi, 4);
    let eg = f64_field(sec, "generator_bound")?;
    ensure((g - eg).abs() <= 1e-3, || format!("generator bound {g:.5}, expected {eg}"))?;
    notes.push(format!("generator bound {g:.5}"));
    Ok(notes.join("; "))
}

// ---------------------------------------------------------------------------
// Random models

fn random_coeffs(rng: &mut ChaCha8Rng, n: usize, biased: bool) -> Vec<i64> {
    // Biased draws favour multiples of a small prime so that reductions are often singular.
    let q = [2i64, 3, 5, 7][rng.gen_range(0..4)];
    (0..n)
        .map(|_| {
            if biased && rng.gen_bool(0.6) {
                q * rng.gen_range(-(10 / q)..=(10 / q))
            } else {
                rng.gen_range(-10..=10)
            }
        })
        .collect()
}

fn random_model(rng: &mut ChaCha8Rng, degree: usize, biased: bool) -> GenusOneModel {
    loop {
        let m = match degree {
            2 => GenusOneModel::deg2(&random_coeffs(rng, 3, biased), &random_coeffs(rng, 5, biased)),
            3 => GenusOneModel::deg3(&random_coeffs(rng, 10, biased)),
            _ => GenusOneModel::deg4(&random_coeffs(rng, 10, biased), &random_coeffs(rng, 10, biased)),
        };
        if is_nonsingular(&m) {
            return m;
        }
    }
}

fn solubility_oracle(_: &Path) -> Res<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut agree, mut insoluble, mut unknown) = (0, 0, 0);
    for degree in [2, 3, 4] {
        for i in 0..200 {
            let m = random_model(&mut rng, degree, i % 2 == 1);
            for p in [2u64, 3, 5, 7] {
                let alg = is_soluble(&m, p).map_err(|e| format!("{m:?} at {p}: {e}"))?;
                if let Some(c) = &alg {
                    ensure(c.verify(&m, p), || format!("certificate fails to verify: {m:?} at {p}"))?;
                }
                let k = if p == 2 { 8 } else { 5 };
                match brute_force_soluble(&m, p, k).map_err(|e| e.to_string())? {
                    BruteForce::Soluble => {
                        ensure(alg.is_some(), || format!("oracle finds a point, algorithm says insoluble: {m:?} at {p}"))?;
                        agree += 1;
                    }
                    BruteForce::Insoluble => {
                        ensure(alg.is_none(), || format!("oracle says insoluble, algorithm soluble: {m:?} at {p}"))?;
                        agree += 1;
                        insoluble += 1;
                    }
                    BruteForce::Unknown => unknown += 1,
                }
            }
        }
    }
    Ok(format!("{agree} agreements ({insoluble} insoluble), {unknown} undecided by the oracle at its precision"))
}

// ---------------------------------------------------------------------------
// 8: covariance, transformation law, minors identity, syzygies

fn rand_mat(rng: &mut ChaCha8Rng, n: usize, b: i64) -> Mat {
    loop {
        let m: Mat = (0..n).map(|_| (0..n).map(|_| rat(rng.gen_range(-b..=b), 1)).collect()).collect();
        if !mat_det(&m).is_zero() {
            return m;
        }
    }
}

fn rand_nonzero(rng: &mut ChaCha8Rng, b: i64) -> Rational {
    loop {
        let v = rng.gen_range(-b..=b);
        if v != 0 {
            return rat(v, 1);
        }
    }
}

fn random_transformation(rng: &mut ChaCha8Rng, degree: usize) -> Transformation {
    match degree {
        2 => Transformation::Deg2 {
            mu: rand_nonzero(rng, 3),
            r: std::array::from_fn(|_| rat(rng.gen_range(-3..=3), 1)),
            n: rand_mat(rng, 2, 3),
        },
        3 => Transformation::Deg3 { mu: rand_nonzero(rng, 3), n: rand_mat(rng, 3, 2) },
        _ => Transformation::Deg4 { m: rand_mat(rng, 2, 2), n: rand_mat(rng, 4, 2) },
    }
}

fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    // Product of random elementary matrices and a signed permutation.
    let mut m: Mat = (0..n).map(|i| (0..n).map(|j| rat((i == j) as i64, 1)).collect()).collect();
    for _ in 0..(3 * n) {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let k = rat(rng.gen_range(-2..=2), 1);
        for c in 0..n {
            let v = &m[j][c] * &k;
            m[i][c] = &m[i][c] + v;
        }
    }
    let s = rng.gen_range(0..n);
    for c in 0..n {
        m[s][c] = -m[s][c].clone();
    }
    m
}

fn diagonal(entries: &[Rational]) -> Mat {
    let n = entries.len();
    (0..n).map(|i| (0..n).map(|j| if i == j { entries[i].clone() } else { Rational::zero() }).collect()).collect()
}

/// Integral or diagonal unit-determinant transformations for the transformation law.
fn law_transformation(rng: &mut ChaCha8Rng, degree: usize, p: i64) -> Transformation {
    let pr = rat(p, 1);
    let one = Rational::one();
    let diag = rng.gen_bool(0.5);
    match (degree, diag) {
        (2, false) => Transformation::Deg2 {
            mu: rat([1, -1][rng.gen_range(0..2)], 1),
            r: std::array::from_fn(|_| rat(rng.gen_range(-3..=3), 1)),
            n: unimodular(rng, 2),
        },
        (2, true) => Transformation::Deg2 { mu: one.clone() / &pr, r: std::array::from_fn(|_| Rational::zero()), n: diagonal(&[pr, one]) },
        (3, false) => Transformation::Deg3 { mu: rat([1, -1][rng.gen_range(0..2)], 1), n: unimodular(rng, 3) },
        (3, true) => Transformation::Deg3 { mu: one.clone() / (&pr * &pr), n: diagonal(&[pr.clone(), pr, one]) },
        (_, false) => Transformation::Deg4 { m: unimodular(rng, 2), n: unimodular(rng, 4) },
        (_, true) => Transformation::Deg4 {
            m: diagonal(&[one.clone() / &pr, one.clone() / &pr]),
            n: diagonal(&[pr.clone(), pr, one.clone(), one]),
        },
    }
}

/// Random model through the coordinate points, with those points (degree 2: (x1, x2, y)).
fn model_with_points(rng: &mut ChaCha8Rng, degree: usize) -> (GenusOneModel, Vec<Vec<Rational>>) {
    loop {
        let (m, pts) = match degree {
            2 => {
                let p = random_coeffs(rng, 3, false);
                let mut q = random_coeffs(rng, 5, false);
                q[0] = 0;
                q[4] = 0;
                let pts = vec![
                    vec![rat(1, 1), rat(0, 1), rat(0, 1)],
                    vec![rat(1, 1), rat(0, 1), rat(-p[0], 1)],
                    vec![rat(0, 1), rat(1, 1), rat(0, 1)],
                    vec![rat(0, 1), rat(1, 1), rat(-p[2], 1)],
                ];
                (GenusOneModel::deg2(&p, &q), pts)
            }
            3 => {
                let mut u = random_coeffs(rng, 10, false);
                u[0] = 0;
                u[1] = 0;
                u[2] = 0;
                let pts = (0..3).map(|k| (0..3).map(|i| rat((i == k) as i64, 1)).collect()).collect();
                (GenusOneModel::deg3(&u), pts)
            }
            _ => {
                let mut a = random_coeffs(rng, 10, false);
                let mut b = random_coeffs(rng, 10, false);
                for i in 0..4 {
                    a[sym_index(i, i)] = 0;
                    b[sym_index(i, i)] = 0;
                }
                let pts = (0..4).map(|k| (0..4).map(|i| rat((i == k) as i64, 1)).collect()).collect();
                (GenusOneModel::deg4(&a, &b), pts)
            }
        };
        if is_nonsingular(&m) {
            return (m, pts);
        }
    }
}

/// The point x' of g(model) with pull_back_point(g, x') = x.
fn push_forward(g: &Transformation, x: &[Rational]) -> Res<Vec<Rational>> {
    let n = g.n_matrix();
    let k = n.len();
    let ninv = mat_inverse(n).map_err(|e| e.to_string())?;
    let mut xp: Vec<Rational> = (0..k).map(|i| (0..k).fold(Rational::zero(), |a, j| a + &x[j] * &ninv[j][i])).collect();
    if let Transformation::Deg2 { mu, r, .. } = g {
        let rx = &r[0] * &x[0] * &x[0] + &r[1] * &x[0] * &x[1] + &r[2] * &x[1] * &x[1];
        xp.push(mu * (&x[2] - rx));
    }
    Ok(xp)
}

fn fg_val(m: &GenusOneModel, x: &[Rational], p: u64) -> Option<i64> {
    let (f, g) = covering_polynomials(m).eval_fg(x);
    fg_valuation(&f, &g, p)
}

fn weight_laws(rng: &mut ChaCha8Rng) -> Res<usize> {
    let mut n = 0;
    for degree in [2, 3, 4] {
        for _ in 0..100 {
            let m = random_model(rng, degree, false);
            let g = random_transformation(rng, degree);
            let gm = apply(&g, &m).map_err(|e| e.to_string())?;
            let (a, b) = (invariants(&m), invariants(&gm));
            let d = g.det();
            let pw = |k: usize| num_traits::pow(d.clone(), k);
            ensure(b.c4 == pw(4) * &a.c4 && b.c6 == pw(6) * &a.c6 && b.disc == pw(12) * &a.disc, || {
                format!("weight law fails for {m:?} under {g:?}")
            })?;
            n += 1;
        }
    }
    Ok(n)
}

fn transformation_law(rng: &mut ChaCha8Rng) -> Res<usize> {
    let mut checked = 0;
    while checked < 100 {
        let degree = [2, 3, 4][checked % 3];
        let (m, pts) = model_with_points(rng, degree);
        let p = [2u64, 3, 5, 7][rng.gen_range(0..4)];
        let g = law_transformation(rng, degree, p as i64);
        if classify_transformation(&g, p) == TransformHypothesis::Unverifiable {
            continue;
        }
        let gm = apply(&g, &m).map_err(|e| e.to_string())?;
        let vn = val_rat(&mat_det(g.n_matrix()), p).finite().unwrap_or(0);
        for x in &pts {
            let xp = push_forward(&g, x)?;
            ensure(gm.contains(&xp) && pull_back_point(&g, &xp) == *x, || "push-forward of a point left the curve".into())?;
            let (Some(v), Some(vp)) = (fg_val(&m, x, p), fg_val(&gm, &xp, p)) else { continue };
            ensure(vp == v - 2 * vn, || format!("max-equality fails at {p}: {m:?} under {g:?} at {x:?}"))?;
            checked += 1;
        }
    }
    Ok(checked)
}

fn minors_identity(rng: &mut ChaCha8Rng) -> Res<usize> {
    for _ in 0..100 {
        let m = random_model(rng, 2, false);
        let cov = covering_polynomials(&m);
        let f: Vec<Rational> = (0..5).map(|i| cov.f.coeff(&[4 - i as u8, i as u8, 0, 0])).collect();
        let g: Vec<Rational> = (0..5).map(|i| cov.g.coeff(&[4 - i as u8, i as u8, 0, 0])).collect();
        let mm = |i: usize, j: usize| &f[i - 1] * &g[j - 1] - &f[j - 1] * &g[i - 1];
        let lhs = rat(-27, 1) * mm(1, 5) * mm(1, 5) + rat(4, 1) * mm(1, 4) * mm(2, 5) - mm(1, 3) * mm(3, 5);
        let disc = invariants(&m).disc;
        ensure(lhs == disc, || format!("minors identity fails on {m:?}: {lhs} vs {disc}"))?;
    }
    Ok(100)
}

/// Rational kernel of a matrix given by rows.
fn kernel_q(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut a: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(i) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, i);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..ncols {
                    let v = &f * &a[r][k];
                    a[i][k] = &a[i][k] - v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Rational::zero(); ncols];
            v[fc] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][fc].clone();
            }
            v
        })
        .collect()
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| rat(rng.gen_range(-3..=3), 1)).collect()
}

fn same_point(a: &[Rational], b: &[Rational]) -> bool {
    (0..a.len()).all(|i| (i..a.len()).all(|j| &a[i] * &b[j] == &a[j] * &b[i]))
}

fn push_new(pts: &mut Vec<Vec<Rational>>, p: Vec<Rational>) {
    if p.iter().any(|x| !x.is_zero()) && !pts.iter().any(|q| same_point(q, &p)) {
        pts.push(p);
    }
}

/// A ternary cubic through 9 random points, and at least 20 of its rational points.
fn cubic_with_points(rng: &mut ChaCha8Rng) -> (GenusOneModel, Vec<Vec<Rational>>) {
    let monos = crate::models::CUBIC_MONOS;
    loop {
        let base: Vec<Vec<Rational>> = (0..9).map(|_| random_point(rng, 3)).collect();
        let rows: Vec<Vec<Rational>> = base
            .iter()
            .map(|p| monos.iter().map(|m| (0..3).fold(Rational::one(), |a, i| a * num_traits::pow(p[i].clone(), m[i] as usize))).collect())
            .collect();
        let ker = kernel_q(&rows, 10);
        if ker.len() != 1 {
            continue;
        }
        let Ok(m) = GenusOneModel::from_coeffs(3, &ker[0]) else { continue };
        if !is_nonsingular(&m) {
            continue;
        }
        let u = &m.forms()[0];
        let grad: Vec<QPoly> = (0..3).map(|i| u.partial(i)).collect();
        let dot = |p: &[Rational], q: &[Rational]| (0..3).fold(Rational::zero(), |a, i| a + grad[i].eval(p) * &q[i]);
        let mut pts = Vec::new();
        for p in &base {
            push_new(&mut pts, p.clone());
        }
        for i in 0..base.len() {
            for j in i + 1..base.len() {
                let (p, q) = (&base[i], &base[j]);
                let (d1, d2) = (dot(p, q), dot(q, p));
                let r: Vec<Rational> = (0..3).map(|k| &d2 * &p[k] - &d1 * &q[k]).collect();
                if m.contains(&r) {
                    push_new(&mut pts, r);
                }
            }
        }
        if pts.len() >= 20 {
            pts.truncate(20);
            return (m, pts);
        }
    }
}

fn bilinear(q: &QPoly, x: &[Rational], y: &[Rational]) -> Rational {
    let s: Vec<Rational> = x.iter().zip(y).map(|(a, b)| a + b).collect();
    q.eval(&s) - q.eval(x) - q.eval(y)
}

/// A quadric intersection through 8 random points, and at least 20 of its rational points.
fn quadrics_with_points(rng: &mut ChaCha8Rng) -> (GenusOneModel, Vec<Vec<Rational>>) {
    loop {
        let base: Vec<Vec<Rational>> = (0..8).map(|_| random_point(rng, 4)).collect();
        let pairs = crate::models::QUAD_PAIRS;
        let rows: Vec<Vec<Rational>> = base.iter().map(|p| pairs.iter().map(|&(i, j)| &p[i] * &p[j]).collect()).collect();
        let ker = kernel_q(&rows, 10);
        if ker.len() != 2 {
            continue;
        }
        let mut c = ker[0].clone();
        c.extend(ker[1].iter().cloned());
        let Ok(m) = GenusOneModel::from_coeffs(4, &c) else { continue };
        if !is_nonsingular(&m) {
            continue;
        }
        let qs = m.forms();
        let mut pts = Vec::new();
        for p in &base {
            push_new(&mut pts, p.clone());
        }
        // The fourth intersection point of C with the plane through three known points.
        'outer: for i in 0..base.len() {
            for j in i + 1..base.len() {
                for k in j + 1..base.len() {
                    let (p1, p2, p3) = (&base[i], &base[j], &base[k]);
                    let co: Vec<[Rational; 3]> =
                        qs.iter().map(|q| [bilinear(q, p1, p2), bilinear(q, p1, p3), bilinear(q, p2, p3)]).collect();
                    let (a1, b1, c1) = (&co[0][0], &co[0][1], &co[0][2]);
                    let (a2, b2, c2) = (&co[1][0], &co[1][1], &co[1][2]);
                    let kk = a2 * b1 - a1 * b2;
                    let ll = a2 * c1 - a1 * c2;
                    for (a, b, cc) in [(a1, b1, c1), (a2, b2, c2)] {
                        let den = b * &ll - cc * &kk;
                        if den.is_zero() {
                            continue;
                        }
                        let w = a * &kk * &ll / den;
                        let r: Vec<Rational> = (0..4).map(|t| &ll * &p1[t] - &kk * &p2[t] + &w * &p3[t]).collect();
                        if m.contains(&r) {
                            push_new(&mut pts, r);
                            if pts.len() >= 20 {
                                break 'outer;
                            }
                            break;
                        }
                    }
                }
            }
        }
        if pts.len() >= 20 {
            return (m, pts);
        }
    }
}

fn syzygies(rng: &mut ChaCha8Rng) -> Res<usize> {
    let mut checked = 0;
    for _ in 0..3 {
        let (m, pts) = cubic_with_points(rng);
        let cov = covering_polynomials(&m);
        let i = &cov.invariants;
        let (x, y, z) = (cov.part("X"), cov.part("Y"), cov.part("Z"));
        for p in &pts {
            let (xv, yv, zv) = (x.eval(p), y.eval(p), z.eval(p));
            let z2 = &zv * &zv;
            let lhs = &yv * &yv + &i.a1 * &xv * &yv * &zv + &i.a3 * &yv * &zv * &z2;
            let rhs = &xv * &xv * &xv + &i.a2 * &xv * &xv * &z2 + &i.a4 * &xv * &z2 * &z2 + &i.a6 * &z2 * &z2 * &z2;
            ensure(lhs == rhs, || format!("cubic syzygy fails on {m:?} at {p:?}"))?;
            checked += 1;
        }
    }
    for _ in 0..3 {
        let (m, pts) = quadrics_with_points(rng);
        let cov = covering_polynomials(&m);
        let e = covering_curve(&m);
        let (pf, rd) = (cov.part("pf"), cov.part("rd"));
        for p in &pts {
            let t1 = cov.part("T1").eval(p);
            let t2 = cov.part("T2").eval(p);
            let yv = cov.part("Y").eval(p);
            let pv = pf.eval(&[t1.clone(), -t2.clone()]);
            let qv = rd.eval(&[t1, -t2]);
            ensure((&yv * &yv + pv * &yv - qv).is_zero(), || format!("quadric syzygy fails on {m:?} at {p:?}"))?;
            if let Ok(CurvePoint::Affine { x, y }) = evaluate_covering(&m, p) {
                ensure(e.contains(&x, &y), || format!("image of {p:?} is not on the Jacobian"))?;
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn covariance_syzygies(_: &Path) -> Res<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let w = weight_laws(&mut rng)?;
    let t = transformation_law(&mut rng)?;
    let l = minors_identity(&mut rng)?;
    let s = syzygies(&mut rng)?;
    Ok(format!("{w} weight laws, {t} max-equalities, {l} minors identities, {s} syzygy evaluations"))
}

// ---------------------------------------------------------------------------
// 9: bounds on the distances

/// Largest prime examined in the distance-bound property.
const BOUND_PRIME_CAP: u64 = 2000;
/// Height of the point search whose local contributions must lie in A_p.
const POINT_CHECK_HEIGHT: u64 = 30;

/// The level (v(disc) - v(disc of the minimal curve)) / 12 at each prime.
fn levels(m: &GenusOneModel, primes: &[u64]) -> Res<Vec<i64>> {
    let inv = invariants(m);
    let (e, _) = crate::heights::minimal_weierstrass(&inv.c4, &inv.c6)
        .map_err(|e| format!("{m:?} c4 = {} c6 = {}: {e}", inv.c4, inv.c6))?;
    let de = e.disc();
    Ok(primes
        .iter()
        .map(|&p| {
            let v = |q: &Rational| val_rat(q, p).finite().unwrap_or(0) as i64;
            (v(&inv.disc) - v(&de)) / 12
        })
        .collect())
}

fn distance_bounds(_: &Path) -> Res<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut models, mut primes, mut v_one, mut skipped, mut points) = (0, 0, 0, 0, 0);
    for degree in [2, 3, 4] {
        let mut done = 0;
        while done < 100 {
            let m = random_model(&mut rng, degree, done % 2 == 1);
            let disc = invariants(&m).disc;
            let bad: Vec<u64> = factor_integer(&disc.to_integer().abs())
                .into_iter()
                .filter_map(|(p, _)| u64::try_from(p).ok())
                .filter(|&p| p <= BOUND_PRIME_CAP)
                .collect();
            let lv = levels(&m, &bad)?;
            let mut sets = Vec::new();
            let mut soluble = true;
            for (&p, &l) in bad.iter().zip(&lv) {
                if l != 0 {
                    skipped += 1;
                    continue;
                }
                let a = tamagawa_distances(&m, p, Chart::Full).map_err(|e| format!("{m:?} at {p}: {e}"))?;
                if a.distances.is_empty() {
                    soluble = false;
                    break;
                }
                sets.push(a);
            }
            if !soluble || sets.is_empty() {
                continue;
            }
            for a in &sets {
                let v = val_rat(&disc, a.p).finite().unwrap_or(0) as u32;
                let bound = distance_bound(degree, v);
                let max = a.max().unwrap_or(0);
                ensure(max <= bound, || format!("{m:?}: max A_{} = {max} exceeds {bound}", a.p))?;
                if v == 1 {
                    ensure(a.distances == vec![0], || format!("{m:?}: v(disc) = 1 but A_{} = {:?}", a.p, a.distances))?;
                    v_one += 1;
                }
                primes += 1;
            }
            for pt in search_points(&m, POINT_CHECK_HEIGHT).map_err(|e| e.to_string())? {
                let x: Vec<Rational> = pt.iter().map(|c| Rational::from_integer(c.clone())).collect();
                for a in &sets {
                    let Some(v) = fg_val(&m, &x, a.p) else { continue };
                    ensure(v % 2 == 0 && a.distances.contains(&((v / 2) as u32)), || {
                        format!("{m:?}: point {pt:?} has alpha_{} = {v}/2 outside {:?}", a.p, a.distances)
                    })?;
                    points += 1;
                }
            }
            done += 1;
            models += 1;
        }
    }
    Ok(format!(
        "{models} models, {primes} level-0 bad primes (v = 1 at {v_one}), {skipped} positive-level primes skipped, \
         {points} point contributions inside A_p"
    ))
}

// ---------------------------------------------------------------------------
// 10: real-place audit

fn real_audit(data: &Path) -> Res<String> {
    let exp = expected(data)?;
    let mut total = 0;
    let mut count = 0;
    for sec in ["rank_two", "mordell", "twists"] {
        let s = field(&exp, sec)?;
        let cname = str_field(s, "curve")?;
        let e = curve(data, &cname)?;
        for entry in array(s, "models")? {
            let name = str_field(entry, "model")?;
            let m = model(data, &name)?;
            let r = crate::heights::model_shift(&m, &e).map_err(err(&name))?.r;
            let b = crate::realplace::delta_epsilon_real(&m, &r, 10).map_err(err(&name))?;
            let a = audit(&m, &b, 10_000, 1e-6).map_err(err(&name))?;
            ensure(a.samples >= 10_000 && a.outside == 0, || {
                format!("{name}: {} of {} samples outside, sampled range [{}, {}]", a.outside, a.samples, a.min_sampled, a.max_sampled)
            })?;
            total += a.samples;
            count += 1;
        }
    }
    Ok(format!("{count} models, {total} samples inside [eps, delta]"))
}
