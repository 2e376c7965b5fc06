//! Genus one models of degree 2, 3 and 4, the groups acting on them, and their invariants.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exactmath::mpoly::{det_cofactor, Mono};
use crate::exactmath::rational::{format_rational, parse_rational, rat, val_rat, Rational};
use crate::exactmath::{QPoly, ZPoly};

/// Monomials of a ternary cubic in coefficient order (a, b, c, f, g, h, i, j, k, m).
pub const CUBIC_MONOS: [Mono; 10] = [
    [3, 0, 0, 0],
    [0, 3, 0, 0],
    [0, 0, 3, 0],
    [0, 2, 1, 0],
    [1, 0, 2, 0],
    [2, 1, 0, 0],
    [0, 1, 2, 0],
    [2, 0, 1, 0],
    [1, 2, 0, 0],
    [1, 1, 1, 0],
];

/// Index pairs (i, j), i <= j, of a quaternary quadratic form in coefficient order.
pub const QUAD_PAIRS: [(usize, usize); 10] =
    [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];

pub fn sym_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    QUAD_PAIRS.iter().position(|&q| q == (i, j)).unwrap()
}

fn pair_mono(i: usize, j: usize) -> Mono {
    let mut m = [0u8; 4];
    m[i] += 1;
    m[j] += 1;
    m
}

#[derive(Clone, Debug, PartialEq)]
pub enum GenusOneModel {
    /// y^2 + P(x1,x2) y = Q(x1,x2) with P = (l, m, n), Q = (a, b, c, d, e).
    Deg2 { p: [Rational; 3], q: [Rational; 5] },
    /// Ternary cubic with coefficients (a, b, c, f, g, h, i, j, k, m).
    Deg3 { u: [Rational; 10] },
    /// Quadric intersection; coefficients a_ij, b_ij in `QUAD_PAIRS` order.
    Deg4 { q1: [Rational; 10], q2: [Rational; 10] },
}

fn arr<const N: usize>(v: &[Rational]) -> [Rational; N] {
    std::array::from_fn(|i| v[i].clone())
}

fn ints<const N: usize>(v: &[i64]) -> [Rational; N] {
    std::array::from_fn(|i| rat(v[i], 1))
}

impl GenusOneModel {
    pub fn deg2(p: &[i64], q: &[i64]) -> Self {
        GenusOneModel::Deg2 { p: ints(p), q: ints(q) }
    }

    pub fn deg3(u: &[i64]) -> Self {
        GenusOneModel::Deg3 { u: ints(u) }
    }

    /// Builds a quadric intersection from coefficient lists in `QUAD_PAIRS` order.
    pub fn deg4(q1: &[i64], q2: &[i64]) -> Self {
        GenusOneModel::Deg4 { q1: ints(q1), q2: ints(q2) }
    }

    pub fn degree(&self) -> usize {
        match self {
            GenusOneModel::Deg2 { .. } => 2,
            GenusOneModel::Deg3 { .. } => 3,
            GenusOneModel::Deg4 { .. } => 4,
        }
    }

    pub fn coeffs(&self) -> Vec<Rational> {
        match self {
            GenusOneModel::Deg2 { p, q } => p.iter().chain(q.iter()).cloned().collect(),
            GenusOneModel::Deg3 { u } => u.to_vec(),
            GenusOneModel::Deg4 { q1, q2 } => q1.iter().chain(q2.iter()).cloned().collect(),
        }
    }

    pub fn from_coeffs(degree: usize, c: &[Rational]) -> Result<Self> {
        let need = match degree {
            2 => 8,
            3 => 10,
            4 => 20,
            _ => return Err(Error::Input(format!("unsupported degree {degree}"))),
        };
        if c.len() != need {
            return Err(Error::Input(format!("degree {degree} model needs {need} coefficients, got {}", c.len())));
        }
        Ok(match degree {
            2 => GenusOneModel::Deg2 { p: arr(&c[..3]), q: arr(&c[3..]) },
            3 => GenusOneModel::Deg3 { u: arr(c) },
            _ => GenusOneModel::Deg4 { q1: arr(&c[..10]), q2: arr(&c[10..]) },
        })
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs().iter().all(|c| c.is_integer())
    }

    pub fn is_p_integral(&self, p: u64) -> bool {
        self.coeffs().iter().all(|c| val_rat(c, p).finite().map_or(true, |v| v >= 0))
    }

    /// The defining forms: (P, Q) for degree 2, (U) for degree 3, (Q1, Q2) for degree 4.
    pub fn forms(&self) -> Vec<QPoly> {
        match self {
            GenusOneModel::Deg2 { p, q } => {
                let pp = QPoly::from_terms(2, (0..3).map(|i| ([2 - i as u8, i as u8, 0, 0], p[i].clone())));
                let qq = QPoly::from_terms(2, (0..5).map(|i| ([4 - i as u8, i as u8, 0, 0], q[i].clone())));
                vec![pp, qq]
            }
            GenusOneModel::Deg3 { u } => {
                vec![QPoly::from_terms(3, CUBIC_MONOS.iter().zip(u.iter()).map(|(m, c)| (*m, c.clone())))]
            }
            GenusOneModel::Deg4 { q1, q2 } => [q1, q2]
                .iter()
                .map(|q| QPoly::from_terms(4, QUAD_PAIRS.iter().zip(q.iter()).map(|(&(i, j), c)| (pair_mono(i, j), c.clone()))))
                .collect(),
        }
    }

    pub fn from_forms(degree: usize, forms: &[QPoly]) -> Result<Self> {
        let c: Vec<Rational> = match degree {
            2 => {
                let (pp, qq) = (&forms[0], &forms[1]);
                let mut v: Vec<Rational> = (0..3).map(|i| pp.coeff(&[2 - i as u8, i as u8, 0, 0])).collect();
                v.extend((0..5).map(|i| qq.coeff(&[4 - i as u8, i as u8, 0, 0])));
                if pp.total_degree().map_or(false, |d| d != 2) || !pp.is_homogeneous() {
                    return Err(Error::Input("P must be a binary quadratic form".into()));
                }
                if qq.total_degree().map_or(false, |d| d != 4) || !qq.is_homogeneous() {
                    return Err(Error::Input("Q must be a binary quartic form".into()));
                }
                v
            }
            3 => {
                let u = &forms[0];
                if u.total_degree().map_or(false, |d| d != 3) || !u.is_homogeneous() {
                    return Err(Error::Input("U must be a ternary cubic form".into()));
                }
                CUBIC_MONOS.iter().map(|m| u.coeff(m)).collect()
            }
            4 => {
                let mut v = Vec::new();
                for q in &forms[..2] {
                    if q.total_degree().map_or(false, |d| d != 2) || !q.is_homogeneous() {
                        return Err(Error::Input("Q1, Q2 must be quaternary quadratic forms".into()));
                    }
                    v.extend(QUAD_PAIRS.iter().map(|&(i, j)| q.coeff(&pair_mono(i, j))));
                }
                v
            }
            _ => return Err(Error::Input(format!("unsupported degree {degree}"))),
        };
        Self::from_coeffs(degree, &c)
    }

    /// Defining equations as polynomials: y^2 + P y - Q in (x1, x2, y) for degree 2, else the forms.
    pub fn equations(&self) -> Vec<QPoly> {
        let f = self.forms();
        match self {
            GenusOneModel::Deg2 { .. } => {
                let y = QPoly::var(3, 2);
                let pp = f[0].with_nvars(3);
                let qq = f[1].with_nvars(3);
                vec![&(&(&y * &y) + &(&pp * &y)) - &qq]
            }
            _ => f,
        }
    }

    /// Integer forms of an integral model.
    pub fn int_forms(&self) -> Result<Vec<ZPoly>> {
        self.forms()
            .iter()
            .map(|f| f.to_integer().ok_or_else(|| Error::Input("model is not integral".into())))
            .collect()
    }

    /// Whether a point lies on the model (degree 2 points are (x1, x2, y)).
    pub fn contains(&self, pt: &[Rational]) -> bool {
        self.equations().iter().all(|e| e.eval(pt).is_zero())
    }

    pub fn invariants(&self) -> InvariantData {
        invariants(self)
    }

    /// The doubled generalised binary quartic (pf, rd) of a quadric intersection.
    pub fn doubling(&self) -> Result<GenusOneModel> {
        match self {
            GenusOneModel::Deg4 { q1, q2 } => Ok(doubling(q1, q2)),
            _ => Err(Error::Input("doubling is defined for quadric intersections".into())),
        }
    }

    pub fn to_json(&self) -> Value {
        let s = |v: &[Rational]| Value::Array(v.iter().map(rat_json).collect());
        match self {
            GenusOneModel::Deg2 { p, q } => serde_json::json!({"degree": 2, "P": s(p), "Q": s(q)}),
            GenusOneModel::Deg3 { u } => serde_json::json!({"degree": 3, "coeffs": s(u)}),
            GenusOneModel::Deg4 { q1, q2 } => {
                let l = |q: &[Rational; 10]| {
                    Value::Array(
                        QUAD_PAIRS
                            .iter()
                            .zip(q.iter())
                            .filter(|(_, c)| !c.is_zero())
                            .map(|(&(i, j), c)| serde_json::json!([i + 1, j + 1, rat_json(c)]))
                            .collect(),
                    )
                };
                serde_json::json!({"degree": 4, "Q1": l(q1), "Q2": l(q2)})
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let deg = v.get("degree").and_then(|d| d.as_u64()).ok_or_else(|| Error::Input("missing degree".into()))?;
        let list = |key: &str| -> Result<Vec<Rational>> {
            v.get(key)
                .and_then(|a| a.as_array())
                .ok_or_else(|| Error::Input(format!("missing array '{key}'")))?
                .iter()
                .map(json_rat)
                .collect()
        };
        match deg {
            2 => {
                let mut c = list("P")?;
                c.extend(list("Q")?);
                Self::from_coeffs(2, &c)
            }
            3 => Self::from_coeffs(3, &list("coeffs")?),
            4 => {
                let mut c = Vec::new();
                for key in ["Q1", "Q2"] {
                    let mut q = vec![Rational::zero(); 10];
                    let entries = v
                        .get(key)
                        .and_then(|a| a.as_array())
                        .ok_or_else(|| Error::Input(format!("missing array '{key}'")))?;
                    for e in entries {
                        let e = e.as_array().filter(|e| e.len() == 3).ok_or_else(|| Error::Input("entries are [i, j, coeff]".into()))?;
                        let i = e[0].as_u64().filter(|&i| (1..=4).contains(&i));
                        let j = e[1].as_u64().filter(|&j| (1..=4).contains(&j));
                        let (i, j) = match (i, j) {
                            (Some(i), Some(j)) => (i as usize - 1, j as usize - 1),
                            _ => return Err(Error::Input("indices must be in 1..=4".into())),
                        };
                        let k = sym_index(i, j);
                        q[k] = &q[k] + json_rat(&e[2])?;
                    }
                    c.extend(q);
                }
                Self::from_coeffs(4, &c)
            }
            d => Err(Error::Input(format!("unsupported degree {d}"))),
        }
    }
}

pub fn rat_json(q: &Rational) -> Value {
    if q.is_integer() {
        if let Ok(n) = i64::try_from(q.numer()) {
            return Value::from(n);
        }
    }
    Value::String(format_rational(q))
}

pub fn json_rat(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(rat(i, 1))
            } else {
                parse_rational(&n.to_string())
            }
        }
        Value::String(s) => parse_rational(s),
        _ => Err(Error::Input(format!("expected a rational, got {v}"))),
    }
}

// ---------------------------------------------------------------------------
// Transformations

pub type Mat = Vec<Vec<Rational>>;

pub fn mat_identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..b.len()).fold(Rational::zero(), |s, k| s + &a[i][k] * &b[k][j])).collect())
        .collect()
}

pub fn mat_transpose(a: &Mat) -> Mat {
    (0..a[0].len()).map(|j| (0..a.len()).map(|i| a[i][j].clone()).collect()).collect()
}

pub fn mat_det(a: &Mat) -> Rational {
    let mut m = a.clone();
    let n = m.len();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Rational::zero();
        };
        if r != c {
            m.swap(r, c);
            det = -det;
        }
        det *= &m[c][c];
        for r in c + 1..n {
            let f = &m[r][c] / &m[c][c];
            for k in c..n {
                let t = &f * &m[c][k];
                m[r][k] -= t;
            }
        }
    }
    det
}

pub fn mat_inverse(a: &Mat) -> Result<Mat> {
    let n = a.len();
    let mut m: Mat = a.iter().zip(mat_identity(n)).map(|(r, e)| r.iter().cloned().chain(e).collect()).collect();
    for c in 0..n {
        let r = (c..n).find(|&r| !m[r][c].is_zero()).ok_or_else(|| Error::Domain("singular matrix".into()))?;
        m.swap(r, c);
        let piv = m[c][c].clone();
        for k in 0..2 * n {
            m[c][k] = &m[c][k] / &piv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in 0..2 * n {
                    let t = &f * &m[c][k];
                    m[r][k] -= t;
                }
            }
        }
    }
    Ok(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_from_i64(v: &[&[i64]]) -> Mat {
    v.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Transformation {
    /// [mu, r, N]: y <- mu^{-1} y + r0 x1^2 + r1 x1 x2 + r2 x2^2, then x_j <- sum_i n_ij x_i.
    Deg2 { mu: Rational, r: [Rational; 3], n: Mat },
    /// [mu, N]: multiply through by mu, then x_j <- sum_i n_ij x_i.
    Deg3 { mu: Rational, n: Mat },
    /// [M, N]: Q_i <- sum_j m_ij Q_j, then x_j <- sum_i n_ij x_i.
    Deg4 { m: Mat, n: Mat },
}

impl Transformation {
    pub fn identity(degree: usize) -> Self {
        match degree {
            2 => Transformation::Deg2 { mu: Rational::one(), r: ints(&[0, 0, 0]), n: mat_identity(2) },
            3 => Transformation::Deg3 { mu: Rational::one(), n: mat_identity(3) },
            _ => Transformation::Deg4 { m: mat_identity(2), n: mat_identity(4) },
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Transformation::Deg2 { .. } => 2,
            Transformation::Deg3 { .. } => 3,
            Transformation::Deg4 { .. } => 4,
        }
    }

    pub fn n_matrix(&self) -> &Mat {
        match self {
            Transformation::Deg2 { n, .. } | Transformation::Deg3 { n, .. } | Transformation::Deg4 { n, .. } => n,
        }
    }

    pub fn det(&self) -> Rational {
        match self {
            Transformation::Deg2 { mu, n, .. } | Transformation::Deg3 { mu, n } => mu * mat_det(n),
            Transformation::Deg4 { m, n } => mat_det(m) * mat_det(n),
        }
    }

    /// Composition realizing apply(g1, apply(g2, _)) = apply(g1.compose(g2), _).
    pub fn compose(&self, g2: &Transformation) -> Result<Transformation> {
        match (self, g2) {
            (Transformation::Deg3 { mu: m1, n: n1 }, Transformation::Deg3 { mu: m2, n: n2 }) => {
                Ok(Transformation::Deg3 { mu: m1 * m2, n: mat_mul(n1, n2) })
            }
            (Transformation::Deg4 { m: m1, n: n1 }, Transformation::Deg4 { m: m2, n: n2 }) => {
                Ok(Transformation::Deg4 { m: mat_mul(m1, m2), n: mat_mul(n1, n2) })
            }
            (Transformation::Deg2 { mu: mu1, r: r1, n: n1 }, Transformation::Deg2 { mu: mu2, r: r2, n: n2 }) => {
                // r = r2 + mu2^{-1} r1(x N2^{-1})
                let n2inv = mat_inverse(n2)?;
                let r1f = QPoly::from_terms(2, (0..3).map(|i| ([2 - i as u8, i as u8, 0, 0], r1[i].clone())));
                let moved = r1f.linear_subst(&mat_transpose(&n2inv));
                let r: [Rational; 3] =
                    std::array::from_fn(|i| &r2[i] + moved.coeff(&[2 - i as u8, i as u8, 0, 0]) / mu2);
                Ok(Transformation::Deg2 { mu: mu1 * mu2, r, n: mat_mul(n1, n2) })
            }
            _ => Err(Error::Input("cannot compose transformations of different degrees".into())),
        }
    }

    pub fn apply(&self, model: &GenusOneModel) -> Result<GenusOneModel> {
        apply(self, model)
    }

    pub fn to_json(&self) -> Value {
        let m = |a: &Mat| Value::Array(a.iter().map(|r| Value::Array(r.iter().map(rat_json).collect())).collect());
        match self {
            Transformation::Deg2 { mu, r, n } => serde_json::json!({
                "degree": 2, "mu": rat_json(mu), "r": r.iter().map(rat_json).collect::<Vec<_>>(), "N": m(n)
            }),
            Transformation::Deg3 { mu, n } => serde_json::json!({"degree": 3, "mu": rat_json(mu), "N": m(n)}),
            Transformation::Deg4 { m: mm, n } => serde_json::json!({"degree": 4, "M": m(mm), "N": m(n)}),
        }
    }
}

/// The left action of a transformation on a model.
pub fn apply(g: &Transformation, model: &GenusOneModel) -> Result<GenusOneModel> {
    if g.degree() != model.degree() {
        return Err(Error::Input("transformation and model degrees differ".into()));
    }
    let f = model.forms();
    let nt = mat_transpose(g.n_matrix());
    match g {
        Transformation::Deg2 { mu, r, .. } => {
            let rr = QPoly::from_terms(2, (0..3).map(|i| ([2 - i as u8, i as u8, 0, 0], r[i].clone())));
            let two = QPoly::constant(2, rat(2, 1));
            let p1 = (&f[0] + &(&two * &rr)).scale(mu);
            let q1 = (&(&f[1] - &(&rr * &f[0])) - &(&rr * &rr)).scale(&(mu * mu));
            GenusOneModel::from_forms(2, &[p1.linear_subst(&nt), q1.linear_subst(&nt)])
        }
        Transformation::Deg3 { mu, .. } => GenusOneModel::from_forms(3, &[f[0].scale(mu).linear_subst(&nt)]),
        Transformation::Deg4 { m, .. } => {
            let q: Vec<QPoly> = (0..2)
                .map(|i| (&f[0].scale(&m[i][0]) + &f[1].scale(&m[i][1])).linear_subst(&nt))
                .collect();
            GenusOneModel::from_forms(4, &q)
        }
    }
}

/// Valuations of the elementary divisors of a p-integral square matrix (Smith normal form over Z_p).
pub fn smith_valuations(n: &Mat, p: u64) -> Option<Vec<i64>> {
    let k = n.len();
    let mut m = n.clone();
    for row in &m {
        for x in row {
            if val_rat(x, p).finite().map_or(false, |v| v < 0) {
                return None;
            }
        }
    }
    let mut out = Vec::new();
    let mut rows: Vec<usize> = (0..k).collect();
    let mut cols: Vec<usize> = (0..k).collect();
    while !rows.is_empty() {
        let mut best: Option<(i64, usize, usize)> = None;
        for &r in &rows {
            for &c in &cols {
                if let Some(v) = val_rat(&m[r][c], p).finite() {
                    if best.map_or(true, |b| v < b.0) {
                        best = Some((v, r, c));
                    }
                }
            }
        }
        let Some((v, r0, c0)) = best else {
            // Remaining block is zero: infinite elementary divisors.
            out.extend(std::iter::repeat(i64::MAX).take(rows.len()));
            break;
        };
        out.push(v);
        let piv = m[r0][c0].clone();
        for &r in &rows {
            if r != r0 {
                let f = &m[r][c0] / &piv;
                for &c in &cols {
                    let t = &f * &m[r0][c];
                    m[r][c] -= t;
                }
            }
        }
        rows.retain(|&r| r != r0);
        cols.retain(|&c| c != c0);
    }
    out.sort();
    Some(out)
}

/// Returns r in 1..n-1 when det g is a p-unit and N has Smith form Diag(I_{n-r}, p I_r) over Z_p.
pub fn transformation_type(g: &Transformation, p: u64) -> Option<usize> {
    let d = g.det();
    if val_rat(&d, p) != crate::exactmath::Valuation::Finite(0) {
        return None;
    }
    let n = g.n_matrix();
    let sv = smith_valuations(n, p)?;
    let k = sv.len();
    let r = sv.iter().filter(|&&v| v == 1).count();
    if sv.iter().all(|&v| v == 0 || v == 1) && r > 0 && r < k {
        Some(r)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Invariants

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantData {
    #[serde(with = "ser_rat")]
    pub a1: Rational,
    #[serde(with = "ser_rat")]
    pub a2: Rational,
    #[serde(with = "ser_rat")]
    pub a3: Rational,
    #[serde(with = "ser_rat")]
    pub a4: Rational,
    #[serde(with = "ser_rat")]
    pub a6: Rational,
    #[serde(with = "ser_rat")]
    pub b2: Rational,
    #[serde(with = "ser_rat")]
    pub b4: Rational,
    #[serde(with = "ser_rat")]
    pub b6: Rational,
    #[serde(with = "ser_rat")]
    pub b8: Rational,
    #[serde(with = "ser_rat")]
    pub c4: Rational,
    #[serde(with = "ser_rat")]
    pub c6: Rational,
    #[serde(with = "ser_rat")]
    pub disc: Rational,
}

pub mod ser_rat {
    use crate::exactmath::rational::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

impl InvariantData {
    pub fn from_ainvariants(a: [Rational; 5]) -> InvariantData {
        let [a1, a2, a3, a4, a6] = a;
        let b2 = &a1 * &a1 + rat(4, 1) * &a2;
        let b4 = rat(2, 1) * &a4 + &a1 * &a3;
        let b6 = &a3 * &a3 + rat(4, 1) * &a6;
        let b8 = (&b2 * &b6 - &b4 * &b4) / rat(4, 1);
        let c4 = &b2 * &b2 - rat(24, 1) * &b4;
        let c6 = -(&b2 * &b2 * &b2) + rat(36, 1) * &b2 * &b4 - rat(216, 1) * &b6;
        let disc = (&c4 * &c4 * &c4 - &c6 * &c6) / rat(1728, 1);
        InvariantData { a1, a2, a3, a4, a6, b2, b4, b6, b8, c4, c6, disc }
    }

    pub fn ainvariants(&self) -> [Rational; 5] {
        [self.a1.clone(), self.a2.clone(), self.a3.clone(), self.a4.clone(), self.a6.clone()]
    }
}

/// a-invariants of a generalised binary quartic.
pub fn ainvariants_deg2(p: &[Rational; 3], q: &[Rational; 5]) -> [Rational; 5] {
    let [l, m, n] = p;
    let [a, b, c, d, e] = q;
    let r = |x: i64| rat(x, 1);
    let a1 = m.clone();
    let a2 = -(l * n) + c;
    let a3 = l * d + n * b;
    let a4 = -(l * l * e) - l * n * c - n * n * a - r(4) * a * e + b * d;
    let a6 = -(l * l * c * e) + l * m * b * e - l * n * b * d - m * m * a * e + m * n * a * d - n * n * a * c
        - r(4) * a * c * e
        + a * d * d
        + b * b * e;
    [a1, a2, a3, a4, a6]
}

/// a1..a4 of a ternary cubic.
pub fn ainvariants_deg3_partial(u: &[Rational; 10]) -> [Rational; 4] {
    let [a, b, c, f, g, h, i, j, k, m] = u;
    let r = |x: i64| rat(x, 1);
    let a1 = m.clone();
    let a2 = -(f * j + g * k + h * i);
    let a3 = r(9) * a * b * c - a * f * i - b * g * j - c * h * k - f * g * h - i * j * k;
    let a4 = -r(3) * (a * b * g * i + a * c * f * k + b * c * h * j)
        + a * f * f * g
        + a * i * i * k
        + b * g * g * h
        + b * i * j * j
        + c * f * h * h
        + c * j * k * k
        + f * g * j * k
        + f * h * i * j
        + g * h * i * k;
    [a1, a2, a3, a4]
}

/// Hessian, Theta and J covariants of a ternary cubic.
pub fn cubic_covariants(u: &QPoly) -> (QPoly, QPoly, QPoly) {
    let grad: Vec<QPoly> = (0..3).map(|i| u.partial(i)).collect();
    let hess: Vec<Vec<QPoly>> = (0..3).map(|i| (0..3).map(|j| grad[i].partial(j)).collect()).collect();
    let h = det_cofactor(&hess).scale(&rat(-1, 2));
    let hg: Vec<QPoly> = (0..3).map(|i| h.partial(i)).collect();
    let mut bordered = vec![vec![QPoly::zero(3); 4]; 4];
    for i in 0..3 {
        for j in 0..3 {
            bordered[i][j] = hess[i][j].clone();
        }
        bordered[i][3] = hg[i].clone();
        bordered[3][i] = hg[i].clone();
    }
    let theta = det_cofactor(&bordered).scale(&rat(1, 3));
    let tg: Vec<QPoly> = (0..3).map(|i| theta.partial(i)).collect();
    let jm = vec![grad, hg, tg];
    let jj = det_cofactor(&jm).scale(&rat(1, 18));
    (h, theta, jj)
}

/// c6 of a ternary cubic from the syzygy 12 J^2 = Theta^3 - ... evaluated at rational points.
fn cubic_c6_from_syzygy(u: &QPoly, h: &QPoly, th: &QPoly, jj: &QPoly, c4: &Rational) -> Option<Rational> {
    let pts: [[i64; 3]; 8] =
        [[1, 2, 3], [2, -1, 5], [-3, 4, 1], [5, 1, -2], [1, -7, 4], [3, 3, -8], [7, -2, 9], [-4, 5, 11]];
    let r = |x: i64| rat(x, 1);
    let mut rows: Vec<(Rational, Rational, Rational)> = Vec::new();
    for p in pts.iter() {
        let x: Vec<Rational> = p.iter().map(|&v| r(v)).collect();
        let (uu, hh, tt, j) = (u.eval(&x), h.eval(&x), th.eval(&x), jj.eval(&x));
        let pw = |a: &Rational, e: i32| num_traits::pow(a.clone(), e as usize);
        let known = pw(&tt, 3) - r(3) * c4 * &tt * pw(&hh, 4) - r(9) * c4 * pw(&tt, 2) * &hh * &uu
            + r(21) * pw(c4, 2) * pw(&hh, 5) * &uu
            + r(9) * pw(c4, 2) * &tt * pw(&hh, 2) * pw(&uu, 2)
            + r(27) * pw(c4, 3) * pw(&hh, 3) * pw(&uu, 3)
            + r(9) * pw(c4, 3) * &tt * pw(&uu, 4)
            + r(9) * pw(c4, 4) * &hh * pw(&uu, 5);
        let rhs = r(12) * &j * &j - known;
        let s1 = -r(2) * pw(&hh, 6) + r(12) * &tt * pw(&hh, 3) * &uu + r(6) * pw(&tt, 2) * pw(&uu, 2)
            - r(72) * c4 * pw(&hh, 4) * pw(&uu, 2)
            - r(24) * c4 * &tt * &hh * pw(&uu, 3)
            - r(48) * pw(c4, 2) * pw(&hh, 2) * pw(&uu, 4);
        let s2 = r(64) * pw(&hh, 3) * pw(&uu, 3);
        rows.push((rhs, s1, s2));
    }
    for a in 0..rows.len() {
        for b in a + 1..rows.len() {
            let (r1, s11, s21) = &rows[a];
            let (r2, s12, s22) = &rows[b];
            let den = s11 * s22 - s12 * s21;
            if den.is_zero() {
                continue;
            }
            let c6 = (r1 * s22 - r2 * s21) / den;
            if rows.iter().all(|(rr, s1, s2)| *rr == &c6 * s1 + &c6 * &c6 * s2) {
                return Some(c6);
            }
        }
    }
    None
}

fn cubic_c6(u_coeffs: &[Rational; 10]) -> Rational {
    let u = QPoly::from_terms(3, CUBIC_MONOS.iter().zip(u_coeffs.iter()).map(|(m, c)| (*m, c.clone())));
    let (h, th, jj) = cubic_covariants(&u);
    if h.is_zero() {
        // A cone over a binary cubic: every covariant vanishes and c4 = c6 = 0.
        return Rational::zero();
    }
    let c4 = cubic_c4(u_coeffs);
    if let Some(c6) = cubic_c6_from_syzygy(&u, &h, &th, &jj, &c4) {
        return c6;
    }
    // Degenerate configurations: c6 is a sextic in the coefficients, so interpolate
    // c6(U + t V) at seven generic t and evaluate at t = 0.
    let v: [i64; 10] = [1, -2, 3, 1, -1, 2, 5, -3, 1, 4];
    let mut ts = Vec::new();
    let mut vals = Vec::new();
    let mut t = 1i64;
    while ts.len() < 7 {
        let ut: [Rational; 10] = std::array::from_fn(|i| &u_coeffs[i] + rat(t * v[i], 1));
        let uu = QPoly::from_terms(3, CUBIC_MONOS.iter().zip(ut.iter()).map(|(m, c)| (*m, c.clone())));
        let (h2, th2, jj2) = cubic_covariants(&uu);
        if let Some(c6) = cubic_c6_from_syzygy(&uu, &h2, &th2, &jj2, &cubic_c4(&ut)) {
            ts.push(rat(t, 1));
            vals.push(c6);
        }
        t += 1;
        assert!(t < 200, "no generic perturbation found for the cubic invariant");
    }
    let mut acc = Rational::zero();
    for i in 0..7 {
        let mut w = vals[i].clone();
        for k in 0..7 {
            if k != i {
                w = w * (-&ts[k]) / (&ts[i] - &ts[k]);
            }
        }
        acc += w;
    }
    acc
}

fn cubic_c4(u: &[Rational; 10]) -> Rational {
    let [a1, a2, a3, a4] = ainvariants_deg3_partial(u);
    let b2 = &a1 * &a1 + rat(4, 1) * &a2;
    let b4 = rat(2, 1) * &a4 + &a1 * &a3;
    &b2 * &b2 - rat(24, 1) * &b4
}

/// pf and rd of the pencil x Q1 + z Q2: the doubled generalised binary quartic.
pub fn doubling(q1: &[Rational; 10], q2: &[Rational; 10]) -> GenusOneModel {
    let x = QPoly::var(2, 0);
    let z = QPoly::var(2, 1);
    let c: Vec<QPoly> = (0..10).map(|k| &x.scale(&q1[k]) + &z.scale(&q2[k])).collect();
    let cc = |i: usize, j: usize| c[sym_index(i, j)].clone();
    let pf = &(&(&cc(0, 1) * &cc(2, 3)) + &(&cc(0, 2) * &cc(1, 3))) + &(&cc(0, 3) * &cc(1, 2));
    let hess: Vec<Vec<QPoly>> = (0..4)
        .map(|i| (0..4).map(|j| if i == j { cc(i, i).scale(&rat(2, 1)) } else { cc(i, j) }).collect())
        .collect();
    let det = det_cofactor(&hess);
    let rd = (&det - &(&pf * &pf)).scale(&rat(1, 4));
    GenusOneModel::from_forms(2, &[pf, rd]).expect("doubling yields a binary quartic")
}

pub fn ainvariants(model: &GenusOneModel) -> [Rational; 5] {
    match model {
        GenusOneModel::Deg2 { p, q } => ainvariants_deg2(p, q),
        GenusOneModel::Deg3 { u } => {
            let [a1, a2, a3, a4] = ainvariants_deg3_partial(u);
            let b2 = &a1 * &a1 + rat(4, 1) * &a2;
            let b4 = rat(2, 1) * &a4 + &a1 * &a3;
            let c6 = cubic_c6(u);
            let b6 = (-(&b2 * &b2 * &b2) + rat(36, 1) * &b2 * &b4 - c6) / rat(216, 1);
            let a6 = (b6 - &a3 * &a3) / rat(4, 1);
            [a1, a2, a3, a4, a6]
        }
        GenusOneModel::Deg4 { q1, q2 } => ainvariants(&doubling(q1, q2)),
    }
}

pub fn invariants(model: &GenusOneModel) -> InvariantData {
    InvariantData::from_ainvariants(ainvariants(model))
}

// ---------------------------------------------------------------------------
// Weierstrass curves

#[derive(Clone, Debug, PartialEq)]
pub struct WeierstrassCurve {
    pub a: [Rational; 5],
}

impl WeierstrassCurve {
    pub fn new(a: [Rational; 5]) -> Self {
        WeierstrassCurve { a }
    }

    pub fn from_i64(a: [i64; 5]) -> Self {
        WeierstrassCurve { a: ints(&a) }
    }

    pub fn invariants(&self) -> InvariantData {
        InvariantData::from_ainvariants(self.a.clone())
    }

    pub fn c4(&self) -> Rational {
        self.invariants().c4
    }

    pub fn c6(&self) -> Rational {
        self.invariants().c6
    }

    pub fn disc(&self) -> Rational {
        self.invariants().disc
    }

    /// y^2 + a1 x y + a3 y - (x^3 + a2 x^2 + a4 x + a6).
    pub fn equation_value(&self, x: &Rational, y: &Rational) -> Rational {
        let [a1, a2, a3, a4, a6] = &self.a;
        y * y + a1 * x * y + a3 * y - (x * x * x + a2 * x * x + a4 * x + a6)
    }

    pub fn contains(&self, x: &Rational, y: &Rational) -> bool {
        self.equation_value(x, y).is_zero()
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({"a": self.a.iter().map(rat_json).collect::<Vec<_>>()})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let a = v
            .get("a")
            .and_then(|a| a.as_array())
            .ok_or_else(|| Error::Input("curve JSON needs an 'a' array [a1,a2,a3,a4,a6]".into()))?;
        if a.len() != 5 {
            return Err(Error::Input("curve needs five a-invariants".into()));
        }
        let v: Vec<Rational> = a.iter().map(json_rat).collect::<Result<_>>()?;
        Ok(WeierstrassCurve { a: arr(&v) })
    }

    pub fn is_integral(&self) -> bool {
        self.a.iter().all(|c| c.is_integer())
    }

    pub fn disc_int(&self) -> BigInt {
        self.disc().to_integer()
    }
}

impl std::fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<String> = self.a.iter().map(format_rational).collect();
        write!(f, "[{}]", s.join(","))
    }
}

/// The Weierstrass curve whose coefficients are the a-invariants of a nonsingular model.
pub fn jacobian_from_ainvariants(model: &GenusOneModel) -> Result<WeierstrassCurve> {
    let a = ainvariants(model);
    let e = WeierstrassCurve::new(a);
    if e.disc().is_zero() {
        return Err(Error::Domain("singular model has no Jacobian".into()));
    }
    Ok(e)
}

/// Rescales an arbitrary rational model to an integral one by clearing denominators with a diagonal
/// transformation of unit determinant away from the primes involved; returns (model, scale).
pub fn is_nonsingular(model: &GenusOneModel) -> bool {
    !invariants(model).disc.is_zero()
}

pub fn abs_rat(q: &Rational) -> Rational {
    q.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_normalization() {
        let m2 = GenusOneModel::deg2(&[0, 1, 0], &[0, 0, 0, 0, 0]);
        let m3 = GenusOneModel::deg3(&[0, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
        let mut a = [0i64; 10];
        let mut b = [0i64; 10];
        a[sym_index(0, 1)] = 1;
        b[sym_index(2, 3)] = 1;
        let m4 = GenusOneModel::deg4(&a, &b);
        for m in [m2, m3, m4] {
            let inv = invariants(&m);
            assert_eq!(inv.c4, rat(1, 1));
            assert_eq!(inv.c6, rat(-1, 1));
        }
    }

    #[test]
    fn plain_quartic() {
        let m = GenusOneModel::deg2(&[0, 0, 0], &[1, 0, 0, 0, 1]);
        let inv = invariants(&m);
        assert_eq!((inv.c4, inv.c6, inv.disc), (rat(192, 1), rat(0, 1), rat(4096, 1)));
    }

    #[test]
    fn quartic_formulas_agree() {
        let q = [3i64, -2, 5, 7, -1];
        let m = GenusOneModel::deg2(&[0, 0, 0], &q);
        let inv = invariants(&m);
        let [a, b, c, d, e] = q;
        assert_eq!(inv.c4, rat(16 * (12 * a * e - 3 * b * d + c * c), 1));
        assert_eq!(inv.c6, rat(32 * (72 * a * c * e - 27 * a * d * d - 27 * b * b * e + 9 * b * c * d - 2 * c * c * c), 1));
    }

    #[test]
    fn model_7823_jacobian() {
        let m = GenusOneModel::deg2(&[1, 0, 1], &[-3, 28, -2, -4, 10]);
        let e = jacobian_from_ainvariants(&m).unwrap();
        assert_eq!(e.c4(), rat(0, 1));
        assert_eq!(e.c6(), rat(-6759072, 1));
    }

    #[test]
    fn composition_and_det() {
        let g1 = Transformation::Deg2 { mu: rat(2, 1), r: ints(&[1, -1, 3]), n: mat_from_i64(&[&[1, 2], &[0, 1]]) };
        let g2 = Transformation::Deg2 { mu: rat(-1, 1), r: ints(&[0, 2, 1]), n: mat_from_i64(&[&[3, 1], &[2, 1]]) };
        let m = GenusOneModel::deg2(&[1, 0, -1], &[2, 3, -1, 0, 5]);
        let lhs = apply(&g1, &apply(&g2, &m).unwrap()).unwrap();
        let g = g1.compose(&g2).unwrap();
        assert_eq!(lhs, apply(&g, &m).unwrap());
        assert_eq!(g.det(), g1.det() * g2.det());
        assert_eq!(Transformation::identity(3).det(), rat(1, 1));
    }

    #[test]
    fn types() {
        let p = 5;
        let g = Transformation::Deg4 {
            m: mat_from_i64(&[&[1, 0], &[0, 1]]).iter().map(|r| r.iter().map(|x| x / rat(p, 1)).collect()).collect(),
            n: mat_from_i64(&[&[p, 0, 0, 0], &[0, p, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]),
        };
        assert_eq!(transformation_type(&g, p as u64), Some(2));
        let g3 = Transformation::Deg3 { mu: rat(1, p), n: mat_from_i64(&[&[p, 0, 0], &[0, 1, 0], &[0, 0, 1]]) };
        assert_eq!(transformation_type(&g3, p as u64), Some(1));
        let g3b = Transformation::Deg3 { mu: rat(1, 1), n: mat_from_i64(&[&[p, 0, 0], &[0, 1, 0], &[0, 0, 1]]) };
        assert_eq!(transformation_type(&g3b, p as u64), None);
        assert_eq!(transformation_type(&Transformation::identity(3), 5), None);
    }
}
