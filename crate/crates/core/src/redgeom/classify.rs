//! Geometric classification of singular reductions: orbit labels, Segre symbols of quadric
//! pencils and the components over the algebraic closure.

use serde::Serialize;

use super::*;
use crate::exactmath::ff::Fe;

/// A geometric component of the reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeomComponent {
    pub degree: usize,
    pub multiplicity: usize,
    /// Whether the component is defined over F_p.
    pub rational: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub singular: bool,
    /// Orbit label, "nonsingular", "degenerate pencil" or "unclassified".
    pub label: String,
    pub segre: Option<String>,
    /// Number of rank 2 quadrics in the pencil; absent when a rank 1 quadric exists.
    pub m: Option<usize>,
    pub components: Vec<GeomComponent>,
}

/// The k-rational multiplicity-1 components met by smooth k-points of the reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalComponents {
    /// Lines, conics and (degree 2) sections, with their defining data.
    pub components: Vec<Component>,
    /// Whether some smooth k-point lies on a component of degree n-1 or n.
    pub main: bool,
}

fn gc(degree: usize, multiplicity: usize, rational: bool) -> GeomComponent {
    GeomComponent { degree, multiplicity, rational }
}

fn report(singular: bool, label: &str, components: Vec<GeomComponent>) -> ReductionReport {
    ReductionReport { singular, label: label.to_string(), segre: None, m: None, components }
}

/// The reduction of c4 is nonzero: nodal (multiplicative) rather than cuspidal type.
fn nodal_type(red: &ReducedModel) -> Result<bool> {
    let c4 = red.lift_model()?.invariants().c4;
    Ok(rat_mod(&c4, red.p).map_or(false, |r| r != 0))
}

pub fn rational_components(red: &ReducedModel) -> Result<RationalComponents> {
    let sv = red.survey(Chart::Full)?;
    let mut components: Vec<Component> = Vec::new();
    let mut main = false;
    for c in sv.components() {
        if c == Component::Main {
            main = true;
        } else {
            components.push(c);
        }
    }
    Ok(RationalComponents { components, main })
}

pub fn classify(red: &ReducedModel) -> Result<ReductionReport> {
    if red.is_zero() {
        return Err(Error::Input("model vanishes identically mod p".into()));
    }
    match red.degree {
        2 => classify_deg2(red),
        3 => classify_deg3(red),
        _ => classify_deg4(red),
    }
}

// ---------------------------------------------------------------------------
// Degree 2

/// Root multiplicities over the algebraic closure of a nonzero binary form of degree d.
fn binary_root_multiplicities(k: &Fq, f: &FpPoly, d: usize) -> Vec<(usize, u32)> {
    let vals: Vec<Option<u64>> = (0..f.nvars).map(|i| if i == 0 { None } else { Some(u64::from(i == 1)) }).collect();
    let uf = f.specialize(&vals, k.p).to_upoly();
    let deg = uf.len() - 1;
    let mut out: Vec<(usize, u32)> = k.factor(&uf).into_iter().map(|(g, e)| (g.len() - 1, e)).collect();
    if d > deg {
        out.push((1, (d - deg) as u32));
    }
    out
}

fn classify_deg2(red: &ReducedModel) -> Result<ReductionReport> {
    let p = red.p;
    let nonsingular = red.is_nonsingular()?;
    if nonsingular {
        return Ok(report(false, "nonsingular", vec![gc(2, 1, true)]));
    }
    let split = red.deg2_split();
    if split == Deg2Split::Double {
        return Ok(report(true, "D", vec![gc(1, 2, true)]));
    }
    let two_curves = |rational: bool, label: &str| report(true, label, vec![gc(1, 1, rational), gc(1, 1, rational)]);
    if p == 2 {
        let nodal = nodal_type(red)?;
        let (a, b) = if nodal { ("A1", "A2") } else { ("B1", "B2") };
        return Ok(match split {
            Deg2Split::Rational(_) => two_curves(true, b),
            _ if splits_over_f4(red) => two_curves(false, b),
            _ => report(true, a, vec![gc(2, 1, true)]),
        });
    }
    let k = Fq::fp(p);
    let (pp, qq) = (&red.forms[0], &red.forms[1]);
    let f = pp.mul(pp, p).add(&qq.scale(4, p), p);
    let mut mults: Vec<u32> = Vec::new();
    for (d, e) in binary_root_multiplicities(&k, &f, 4) {
        mults.extend(std::iter::repeat(e).take(d));
    }
    mults.sort_unstable();
    let rational = matches!(split, Deg2Split::Rational(_));
    Ok(match mults.as_slice() {
        [1, 1, 2] => report(true, "A1", vec![gc(2, 1, true)]),
        [2, 2] => two_curves(rational, "A2"),
        [1, 3] => report(true, "B1", vec![gc(2, 1, true)]),
        [4] => two_curves(rational, "B2"),
        _ => report(true, "unclassified", vec![gc(2, 1, true)]),
    })
}

/// Characteristic 2: whether y^2 + P y = Q splits into two curves over F_4.
fn splits_over_f4(red: &ReducedModel) -> bool {
    let k = Fq::quadratic(2).expect("F_4");
    let lift = |f: &FpPoly| -> [Fe; 3] {
        [[f.coeff(&[2, 0, 0, 0]), 0], [f.coeff(&[1, 1, 0, 0]), 0], [f.coeff(&[0, 2, 0, 0]), 0]]
    };
    let pp = lift(&red.forms[0]);
    let qq = quartic_of(&red.forms[1]);
    let mul2 = |a: &[Fe; 3], b: &[Fe; 3]| -> [Fe; 5] {
        let mut out = [k.zero(); 5];
        for i in 0..3 {
            for j in 0..3 {
                out[i + j] = k.add(out[i + j], k.mul(a[i], b[j]));
            }
        }
        out
    };
    let elems: Vec<Fe> = k.elements().collect();
    for &r0 in &elems {
        for &r1 in &elems {
            for &r2 in &elems {
                let r = [r0, r1, r2];
                let (rr, pr) = (mul2(&r, &r), mul2(&pp, &r));
                if (0..5).all(|i| k.is_zero(k.sub(k.add(rr[i], pr[i]), [qq[i], 0]))) {
                    return true;
                }
            }
        }
    }
    false
}

fn quartic_of(q: &FpPoly) -> [u64; 5] {
    let mut out = [0u64; 5];
    for (i, o) in out.iter_mut().enumerate() {
        *o = q.coeff(&[(4 - i) as u8, i as u8, 0, 0]);
    }
    out
}

// ---------------------------------------------------------------------------
// Degree 3

/// Columns of a basis with the given vector last.
fn basis_with_last(v: &[u64], n: usize, p: u64) -> Vec<Vec<u64>> {
    let b = complete_basis(&[v.to_vec()], n, p);
    let mut cols: Vec<Vec<u64>> = b[1..].to_vec();
    cols.push(b[0].clone());
    cols
}

/// A vertex of the cubic cone U, when U involves only two variables after a change of basis.
fn cone_vertex(u: &FpPoly, p: u64) -> Option<Vec<u64>> {
    let is_vertex = |v: &[u64]| {
        let g = u.compose_linear(&basis_with_last(v, 3, p), p);
        g.terms.iter().all(|(m, _)| m[2] == 0)
    };
    let candidates: Vec<Vec<u64>> = if p <= 3 {
        let mut out = Vec::new();
        for idx in 1..p.pow(3) {
            let v: Vec<u64> = (0..3).map(|i| (idx / p.pow(i)) % p).collect();
            if normalize(&v, p) == v {
                out.push(v);
            }
        }
        out
    } else {
        // Rows of the linear system sum_i v_i dU/dx_i = 0, one per quadratic monomial.
        let partials: Vec<FpPoly> = (0..3).map(|i| u.partial(i, p)).collect();
        let mut monos: BTreeSet<Mono> = BTreeSet::new();
        for d in &partials {
            for (m, _) in &d.terms {
                monos.insert(*m);
            }
        }
        let rows: Vec<Vec<u64>> = monos.iter().map(|m| partials.iter().map(|d| d.coeff(m)).collect()).collect();
        if rows.is_empty() {
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]
        } else {
            kernel(&rows, 3, p)
        }
    };
    candidates.into_iter().find(|v| is_vertex(v))
}

/// Half-discriminant of a ternary quadratic form; zero iff the conic is singular.
fn conic_half_disc(q: &FpPoly, p: u64) -> u64 {
    let c = |m: Mono| q.coeff(&m);
    let (a, b, cc) = (c([2, 0, 0, 0]), c([0, 2, 0, 0]), c([0, 0, 2, 0]));
    let (d, e, f) = (c([0, 1, 1, 0]), c([1, 0, 1, 0]), c([1, 1, 0, 0]));
    let pos = addm(mulm(4 % p, mulm(a, mulm(b, cc, p), p), p), mulm(d, mulm(e, f, p), p), p);
    let neg = addm(addm(mulm(a, mulm(d, d, p), p), mulm(b, mulm(e, e, p), p), p), mulm(cc, mulm(f, f, p), p), p);
    subm(pos, neg, p)
}

/// The quotient of a form of degree d by a linear form, when the division is exact.
pub fn divide_form_by_linear(f: &FpPoly, d: usize, l: &[u64], p: u64) -> Option<FpPoly> {
    let n = f.nvars;
    let monos = |deg: usize| -> Vec<Mono> {
        let mut out = Vec::new();
        let mut rec = |m: Mono, _: usize| out.push(m);
        fn go(n: usize, i: usize, left: usize, m: &mut Mono, f: &mut dyn FnMut(Mono, usize)) {
            if i == n - 1 {
                m[i] = left as u8;
                f(*m, 0);
                return;
            }
            for e in 0..=left {
                m[i] = e as u8;
                go(n, i + 1, left - e, m, f);
            }
            m[i] = 0;
        }
        go(n, 0, deg, &mut [0u8; 4], &mut rec);
        out
    };
    let qm = monos(d - 1);
    let fm = monos(d);
    let rows: Vec<Vec<u64>> = fm
        .iter()
        .map(|target| {
            qm.iter()
                .map(|m| {
                    (0..n)
                        .filter(|&i| {
                            let mut mm = *m;
                            mm[i] += 1;
                            mm == *target
                        })
                        .fold(0, |acc, i| addm(acc, l[i], p))
                })
                .collect()
        })
        .collect();
    let rhs: Vec<u64> = fm.iter().map(|m| f.coeff(m)).collect();
    let sol = solve_linear(&rows, &rhs, p)?;
    let terms: Vec<(Mono, u64)> = qm.iter().cloned().zip(sol).collect();
    Some(FpPoly::from_terms(n, &terms, p))
}

fn classify_deg3(red: &ReducedModel) -> Result<ReductionReport> {
    let p = red.p;
    let u = &red.forms[0];
    if red.is_nonsingular()? {
        return Ok(report(false, "nonsingular", vec![gc(3, 1, true)]));
    }
    let k = Fq::fp(p);
    if let Some(v) = cone_vertex(u, p) {
        let binary = u.compose_linear(&basis_with_last(&v, 3, p), p);
        let mut mults: Vec<(usize, u32)> = binary_root_multiplicities(&k, &binary, 3);
        mults.sort_by_key(|&(_, e)| e);
        let comps = |ms: &[(usize, u32)]| -> Vec<GeomComponent> {
            ms.iter().flat_map(|&(d, e)| (0..d).map(move |_| gc(1, e as usize, d == 1))).collect()
        };
        let label = match mults.iter().map(|&(_, e)| e).max() {
            Some(1) => "B3",
            Some(2) => "C",
            _ => "D",
        };
        return Ok(report(true, label, comps(&mults)));
    }
    let sv = red.survey(Chart::Full)?;
    let lines: Vec<Vec<u64>> = sv
        .components()
        .into_iter()
        .filter_map(|c| if let Component::PlaneLine(l) = c { Some(l) } else { None })
        .collect();
    let nodal = nodal_type(red)?;
    let triangle = |r: usize| report(true, "A3", (0..3).map(|i| gc(1, 1, i < r)).collect());
    let conic_line = |label: &str| report(true, label, vec![gc(2, 1, true), gc(1, 1, true)]);
    Ok(match (nodal, lines.len()) {
        (true, 3) => triangle(3),
        (true, 1) => {
            let conic = divide_form_by_linear(u, 3, &lines[0], p).expect("line divides the cubic");
            if conic_half_disc(&conic, p) == 0 {
                triangle(1)
            } else {
                conic_line("A2")
            }
        }
        (true, 0) => {
            if sv.singular.is_empty() {
                triangle(0)
            } else {
                report(true, "A1", vec![gc(3, 1, true)])
            }
        }
        (false, 1) => conic_line("B2"),
        (false, 0) => report(true, "B1", vec![gc(3, 1, true)]),
        _ => report(true, "unclassified", vec![gc(3, 1, true)]),
    })
}

// ---------------------------------------------------------------------------
// Degree 4

/// Symmetric matrix of a quadratic form over F_p, p odd.
fn sym_matrix(q: &FpPoly, p: u64) -> Vec<Vec<u64>> {
    let half = invm(2, p);
    let mut a = vec![vec![0u64; 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            let mut m = [0u8; 4];
            m[i] += 1;
            m[j] += 1;
            let c = q.coeff(&m);
            if i == j {
                a[i][i] = c;
            } else {
                a[i][j] = mulm(c, half, p);
                a[j][i] = a[i][j];
            }
        }
    }
    a
}

/// Determinant of a square matrix of univariate polynomials.
fn poly_det(k: &Fq, m: &[Vec<UPoly>]) -> UPoly {
    let n = m.len();
    if n == 0 {
        return vec![k.one()];
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc: UPoly = vec![];
    for j in 0..n {
        let minor: Vec<Vec<UPoly>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, e)| e.clone()).collect()).collect();
        let term = k.pmul(&m[0][j], &poly_det(k, &minor));
        acc = if j % 2 == 0 { k.padd(&acc, &term) } else { k.psub(&acc, &term) };
    }
    k.trim(acc)
}

fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n)).filter(|s| s.count_ones() as usize == r).map(|s| (0..n).filter(|&i| s >> i & 1 == 1).collect()).collect()
}

/// The gcd of the r x r minors of tA + B, as (monic polynomial in t, multiplicity of the root at
/// infinity); None when every minor vanishes.
fn minor_gcd(k: &Fq, a: &[Vec<u64>], b: &[Vec<u64>], r: usize) -> Option<(UPoly, usize)> {
    let n = a.len();
    let mut g: UPoly = vec![];
    let mut inf = usize::MAX;
    for rows in subsets(n, r) {
        for cols in subsets(n, r) {
            let m: Vec<Vec<UPoly>> = rows
                .iter()
                .map(|&i| cols.iter().map(|&j| k.trim(vec![[b[i][j], 0], [a[i][j], 0]])).collect())
                .collect();
            let d = poly_det(k, &m);
            if d.is_empty() {
                continue;
            }
            inf = inf.min(r - (d.len() - 1));
            g = if g.is_empty() { k.monic(&d) } else { k.pgcd(&g, &d) };
        }
    }
    if g.is_empty() {
        None
    } else {
        Some((k.monic(&g), inf))
    }
}

/// Number of distinct roots on P^1 over the algebraic closure.
fn distinct_roots(k: &Fq, g: &(UPoly, usize)) -> usize {
    k.squarefree(&g.0).iter().map(|(h, _)| h.len() - 1).sum::<usize>() + usize::from(g.1 > 0)
}

/// Segre symbol of the pencil, and the number m of rank 2 members when no member has rank 1.
fn pencil_invariants(q1: &FpPoly, q2: &FpPoly, p: u64) -> (Option<String>, Option<usize>) {
    let k = Fq::fp(p);
    let (a, b) = (sym_matrix(q1, p), sym_matrix(q2, p));
    let m = match (minor_gcd(&k, &a, &b, 2), minor_gcd(&k, &a, &b, 3)) {
        (Some(g2), Some(g3)) if distinct_roots(&k, &g2) == 0 => Some(distinct_roots(&k, &g3)),
        _ => None,
    };
    // Restrict to a complement of the common radical.
    let stacked: Vec<Vec<u64>> = a.iter().chain(b.iter()).cloned().collect();
    let radical = kernel(&stacked, 4, p);
    let comp: Vec<Vec<u64>> = complete_basis(&radical, 4, p)[radical.len()..].to_vec();
    let r = comp.len();
    let restrict = |s: &[Vec<u64>]| -> Vec<Vec<u64>> {
        (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        let mut acc = 0;
                        for x in 0..4 {
                            for y in 0..4 {
                                acc = addm(acc, mulm(comp[i][x], mulm(s[x][y], comp[j][y], p), p), p);
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    };
    let (ar, br) = (restrict(&a), restrict(&b));
    let mut d: Vec<(UPoly, usize)> = vec![(vec![k.one()], 0)];
    for s in 1..=r {
        match minor_gcd(&k, &ar, &br, s) {
            Some(g) => d.push(g),
            None => return (None, m),
        }
    }
    // Invariant factors d_s / d_{s-1}, then the exponents of each irreducible factor.
    let inv: Vec<(UPoly, usize)> = (1..=r).map(|s| (k.divrem(&d[s].0, &d[s - 1].0).0, d[s].1 - d[s - 1].1)).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (phi, _) in k.factor(&d[r].0) {
        let mut blocks: Vec<usize> = Vec::new();
        for (f, _) in &inv {
            let mut e = 0;
            let mut g = f.clone();
            loop {
                let (q, rem) = k.divrem(&g, &phi);
                if !rem.is_empty() || g.len() < phi.len() {
                    break;
                }
                e += 1;
                g = q;
            }
            if e > 0 {
                blocks.push(e);
            }
        }
        blocks.sort_unstable_by(|x, y| y.cmp(x));
        for _ in 0..phi.len() - 1 {
            groups.push(blocks.clone());
        }
    }
    let mut inf_blocks: Vec<usize> = inv.iter().map(|(_, e)| *e).filter(|&e| e > 0).collect();
    if !inf_blocks.is_empty() {
        inf_blocks.sort_unstable_by(|x, y| y.cmp(x));
        groups.push(inf_blocks);
    }
    (Some(format_segre(groups)), m)
}

fn format_segre(mut groups: Vec<Vec<usize>>) -> String {
    groups.sort_by(|x, y| (x.len() > 1).cmp(&(y.len() > 1)).then(x.iter().sum::<usize>().cmp(&y.iter().sum())).then(y.cmp(x)));
    let mut s = String::from("[");
    for g in groups {
        let digits: String = g.iter().map(|e| e.to_string()).collect();
        if g.len() > 1 {
            s.push('(');
            s.push_str(&digits);
            s.push(')');
        } else {
            s.push_str(&digits);
        }
    }
    s.push(']');
    s
}

/// Orbit label and geometric components (degree, multiplicity) for each Segre symbol.
fn segre_table(segre: &str) -> Option<(&'static str, Vec<(usize, usize)>)> {
    let four_lines = vec![(1, 1); 4];
    Some(match segre {
        "[1111]" => ("nonsingular", vec![(4, 1)]),
        "[112]" => ("A1", vec![(4, 1)]),
        "[22]" => ("A2", vec![(3, 1), (1, 1)]),
        "[11(11)]" => ("A3", vec![(2, 1), (2, 1)]),
        "[2(11)]" => ("A4", vec![(2, 1), (1, 1), (1, 1)]),
        "[(11)(11)]" => ("A5", four_lines),
        "[13]" => ("B1", vec![(4, 1)]),
        "[4]" => ("B2", vec![(3, 1), (1, 1)]),
        "[1(21)]" => ("B3", vec![(2, 1), (2, 1)]),
        "[(31)]" => ("B4", vec![(2, 1), (1, 1), (1, 1)]),
        "[111]" => ("B5", four_lines),
        "[(22)]" => ("C2", vec![(1, 2), (1, 1), (1, 1)]),
        "[12]" => ("C3", vec![(1, 2), (1, 1), (1, 1)]),
        "[3]" => ("C4", vec![(1, 3), (1, 1)]),
        "[1(111)]" => ("D1", vec![(2, 2)]),
        "[(211)]" => ("D2", vec![(1, 2), (1, 2)]),
        "[1(11)]" => ("D3", vec![(1, 2), (1, 2)]),
        "[(21)]" => ("D4", vec![(1, 4)]),
        "[11]" => ("D5", vec![(1, 4)]),
        _ => return None,
    })
}

fn coprime(q1: &FpPoly, q2: &FpPoly, p: u64) -> bool {
    if q1.is_zero() || q2.is_zero() {
        return false;
    }
    let monos: BTreeSet<Mono> = q1.terms.iter().chain(q2.terms.iter()).map(|(m, _)| *m).collect();
    let rows: Vec<Vec<u64>> = vec![monos.iter().map(|m| q1.coeff(m)).collect(), monos.iter().map(|m| q2.coeff(m)).collect()];
    rank(&rows, p) == 2 && common_linear_factor(q1, q2, p).is_none()
}

fn classify_deg4(red: &ReducedModel) -> Result<ReductionReport> {
    let p = red.p;
    let (q1, q2) = (&red.forms[0], &red.forms[1]);
    let nonsingular = red.is_nonsingular()?;
    if nonsingular {
        let mut r = report(false, "nonsingular", vec![gc(4, 1, true)]);
        if p != 2 {
            let (segre, m) = pencil_invariants(q1, q2, p);
            r.segre = segre;
            r.m = m;
        }
        return Ok(r);
    }
    if !coprime(q1, q2, p) {
        return Ok(report(true, "degenerate pencil", vec![]));
    }
    if p == 2 {
        let rc = rational_components(red)?;
        let comps = rc
            .components
            .iter()
            .map(|c| gc(if matches!(c, Component::Conic(_)) { 2 } else { 1 }, 1, true))
            .collect();
        return Ok(report(true, "unclassified", comps));
    }
    let (segre, m) = pencil_invariants(q1, q2, p);
    let table = segre.as_deref().and_then(segre_table);
    let Some((label, shape)) = table else {
        // A pencil that stays singular on the quotient by its common radical.
        let mut r = report(true, "C1", vec![gc(2, 1, true), gc(1, 2, true)]);
        r.segre = Some(segre.unwrap_or_else(|| "[1{3}]".to_string()));
        r.m = m;
        return Ok(r);
    };
    let sv = red.survey(Chart::Full)?;
    let found = sv.components();
    let n_lines = found.iter().filter(|c| matches!(c, Component::SpaceLine(_))).count();
    let n_conics = found.iter().filter(|c| matches!(c, Component::Conic(_))).count();
    let n_points = sv.smooth.len() + sv.singular.len();
    let simple_lines = shape.iter().filter(|&&(d, e)| d == 1 && e == 1).count();
    let simple_conics = shape.iter().filter(|&&(d, e)| d == 2 && e == 1).count();
    let double_lines = shape.iter().filter(|&&(d, e)| d == 1 && e == 2).count();
    let mut lines_left = if simple_lines == 1 { 1 } else { n_lines };
    let mut conics_left = if simple_conics == 1 { 1 } else { n_conics };
    let doubles_rational = double_lines < 2 || n_points > 1;
    let components = shape
        .iter()
        .map(|&(d, e)| {
            let rational = match (d, e) {
                (1, 1) => {
                    let r = lines_left > 0;
                    lines_left = lines_left.saturating_sub(1);
                    r
                }
                (2, 1) => {
                    let r = conics_left > 0;
                    conics_left = conics_left.saturating_sub(1);
                    r
                }
                (1, 2) => doubles_rational,
                _ => true,
            };
            gc(d, e, rational)
        })
        .collect();
    let mut r = report(true, label, components);
    r.segre = segre;
    r.m = m;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(nvars: usize, p: u64, t: &[(Mono, i64)]) -> FpPoly {
        let terms: Vec<(Mono, u64)> = t.iter().map(|&(m, c)| (m, c.rem_euclid(p as i64) as u64)).collect();
        FpPoly::from_terms(nvars, &terms, p)
    }

    fn summed(r: &ReductionReport) -> usize {
        r.components.iter().map(|c| c.degree * c.multiplicity).sum()
    }

    #[test]
    fn binary_quartic_labels() {
        let p = 5;
        let zero = FpPoly::zero(2);
        let red = |q: FpPoly| ReducedModel { degree: 2, p, forms: vec![zero.clone(), q] };
        let a2 = classify(&red(fp(2, p, &[([2, 2, 0, 0], 1)]))).unwrap();
        assert_eq!(a2.label, "A2");
        assert!(a2.components.iter().all(|c| c.rational && c.degree == 1));
        let a1 = classify(&red(fp(2, p, &[([3, 1, 0, 0], 1), ([2, 2, 0, 0], 1)]))).unwrap();
        assert_eq!(a1.label, "A1");
        let b1 = classify(&red(fp(2, p, &[([3, 1, 0, 0], 1)]))).unwrap();
        assert_eq!(b1.label, "B1");
        let b2 = classify(&red(fp(2, p, &[([4, 0, 0, 0], 2)]))).unwrap();
        assert_eq!(b2.label, "B2");
        assert!(b2.components.iter().all(|c| !c.rational));
        for r in [&a2, &a1, &b1, &b2] {
            assert_eq!(summed(r), 2);
        }
        let ns = classify(&red(fp(2, p, &[([4, 0, 0, 0], 1), ([0, 4, 0, 0], 1)]))).unwrap();
        assert_eq!(ns.label, "nonsingular");
    }

    #[test]
    fn cubic_labels() {
        let cases: Vec<(u64, Vec<(Mono, i64)>, &str)> = vec![
            (7, vec![([1, 1, 1, 0], 1)], "A3"),
            (7, vec![([1, 1, 1, 0], 1), ([0, 3, 0, 0], -1), ([0, 0, 3, 0], -1)], "A1"),
            (7, vec![([1, 1, 1, 0], 1), ([0, 3, 0, 0], -1)], "A2"),
            (7, vec![([0, 2, 1, 0], 1), ([3, 0, 0, 0], -1)], "B1"),
            (7, vec![([2, 1, 0, 0], 1), ([0, 2, 1, 0], -1)], "B2"),
            (7, vec![([2, 1, 0, 0], 1), ([1, 2, 0, 0], -1)], "B3"),
            (7, vec![([2, 1, 0, 0], 1)], "C"),
            (7, vec![([3, 0, 0, 0], 1)], "D"),
            (5, vec![([1, 1, 1, 0], 1)], "A3"),
            (2, vec![([1, 1, 1, 0], 1), ([0, 3, 0, 0], 1), ([0, 0, 3, 0], 1)], "A1"),
        ];
        for (p, t, label) in cases {
            let red = ReducedModel { degree: 3, p, forms: vec![fp(3, p, &t)] };
            let r = classify(&red).unwrap();
            assert_eq!(r.label, label, "{t:?} mod {p}");
            assert_eq!(summed(&r), 3);
        }
        // x1 x2 x3 has three k-rational lines of multiplicity 1.
        let red = ReducedModel { degree: 3, p: 7, forms: vec![fp(3, 7, &[([1, 1, 1, 0], 1)])] };
        let r = classify(&red).unwrap();
        assert!(r.components.iter().all(|c| c.degree == 1 && c.multiplicity == 1 && c.rational));
        let rc = rational_components(&red).unwrap();
        assert_eq!(rc.components.len(), 3);
        assert!(!rc.main);
        // A triangle over F_7 with a conjugate pair: x (y^2 - 3 z^2), 3 a non-square mod 7.
        let red = ReducedModel { degree: 3, p: 7, forms: vec![fp(3, 7, &[([1, 2, 0, 0], 1), ([1, 0, 2, 0], -3)])] };
        let r = classify(&red).unwrap();
        assert_eq!(r.label, "A3");
        assert_eq!(r.components.iter().filter(|c| c.rational).count(), 1);
        // Three concurrent lines y (y^2 - 3 z^2), two of them conjugate.
        let red = ReducedModel { degree: 3, p: 7, forms: vec![fp(3, 7, &[([0, 3, 0, 0], 1), ([0, 1, 2, 0], -3)])] };
        let r = classify(&red).unwrap();
        assert_eq!(r.label, "B3");
        assert_eq!(r.components.iter().filter(|c| c.rational).count(), 1);
        // Conic and line: the line and a degree-2 main component are reported.
        let red = ReducedModel { degree: 3, p: 7, forms: vec![fp(3, 7, &[([2, 1, 0, 0], 1), ([0, 2, 1, 0], -1)])] };
        let rc = rational_components(&red).unwrap();
        assert_eq!(rc.components, vec![Component::PlaneLine(vec![0, 1, 0])]);
        assert!(rc.main);
    }

    #[test]
    fn quadric_pencil_labels() {
        let p = 5;
        let q = |t: &[(Mono, i64)]| fp(4, p, t);
        let cases: Vec<(Vec<(Mono, i64)>, Vec<(Mono, i64)>, &str, Option<usize>)> = vec![
            (vec![([1, 0, 1, 0], 1), ([0, 2, 0, 0], -1), ([0, 0, 0, 2], -1)], vec![([0, 1, 0, 1], 1), ([0, 0, 2, 0], -1)], "A1", Some(0)),
            (vec![([1, 0, 1, 0], 1), ([0, 2, 0, 0], -1)], vec![([0, 1, 0, 1], 1), ([0, 0, 2, 0], -1)], "A2", Some(0)),
            (vec![([1, 0, 0, 1], 1), ([0, 2, 0, 0], -1), ([0, 0, 2, 0], -1)], vec![([0, 1, 1, 0], 1)], "A3", Some(1)),
            (vec![([1, 0, 1, 0], 1), ([0, 2, 0, 0], -1)], vec![([0, 1, 0, 1], 1)], "A4", Some(1)),
            (vec![([1, 0, 1, 0], 1)], vec![([0, 1, 0, 1], 1)], "A5", Some(2)),
            (vec![([1, 0, 0, 1], 1), ([0, 2, 0, 0], -1)], vec![([0, 1, 0, 1], 1), ([0, 0, 2, 0], -1)], "B1", Some(0)),
            (vec![([1, 0, 0, 1], 1), ([0, 1, 1, 0], -1)], vec![([0, 1, 0, 1], 1), ([0, 0, 2, 0], -1)], "B2", Some(0)),
            (vec![([1, 0, 1, 0], 1), ([1, 0, 0, 1], 1), ([0, 2, 0, 0], -1)], vec![([0, 0, 1, 1], 1)], "B3", Some(1)),
            (vec![([1, 0, 1, 0], 1), ([0, 2, 0, 0], -1), ([0, 1, 0, 1], 1)], vec![([0, 0, 1, 1], 1)], "B4", Some(1)),
            (vec![([0, 1, 1, 0], 1), ([0, 0, 1, 1], -1)], vec![([0, 1, 0, 1], 1), ([0, 0, 1, 1], -1)], "B5", Some(3)),
            (vec![([1, 0, 1, 0], 1), ([0, 1, 0, 1], 1)], vec![([1, 0, 0, 1], 1)], "C2", Some(1)),
            (vec![([0, 1, 1, 0], 1), ([0, 1, 0, 1], -1)], vec![([0, 0, 1, 1], 1)], "C3", Some(2)),
            (vec![([0, 1, 1, 0], 1), ([0, 0, 0, 2], -1)], vec![([0, 0, 1, 1], 1)], "C4", Some(1)),
            (vec![([2, 0, 0, 0], 1), ([0, 1, 1, 0], -1)], vec![([0, 0, 0, 2], 1)], "D1", None),
            (vec![([1, 0, 0, 1], 1), ([0, 1, 1, 0], 1)], vec![([0, 0, 0, 2], 1)], "D2", None),
            (vec![([0, 1, 1, 0], 1)], vec![([0, 0, 0, 2], 1)], "D3", None),
            (vec![([0, 1, 0, 1], 1), ([0, 0, 2, 0], -1)], vec![([0, 0, 0, 2], 1)], "D4", None),
            (vec![([0, 0, 2, 0], 1)], vec![([0, 0, 0, 2], 1)], "D5", None),
        ];
        for (a, b, label, m) in cases {
            let red = ReducedModel { degree: 4, p, forms: vec![q(&a), q(&b)] };
            let r = classify(&red).unwrap();
            assert_eq!(r.label, label, "{a:?} {b:?} segre {:?}", r.segre);
            assert_eq!(r.m, m, "{label}");
            assert_eq!(summed(&r), 4, "{label}");
        }
        let red = ReducedModel { degree: 4, p, forms: vec![q(&[([1, 0, 1, 0], 1)]), q(&[([0, 1, 0, 1], 1)])] };
        let r = classify(&red).unwrap();
        assert_eq!(r.segre.as_deref(), Some("[(11)(11)]"));
        assert!(r.components.iter().all(|c| c.degree == 1 && c.multiplicity == 1 && c.rational));
        // A common linear factor.
        let red = ReducedModel { degree: 4, p, forms: vec![q(&[([1, 1, 0, 0], 1)]), q(&[([1, 0, 1, 0], 1)])] };
        assert_eq!(classify(&red).unwrap().label, "degenerate pencil");
        // Double conic: no multiplicity-1 component.
        let red = ReducedModel { degree: 4, p, forms: vec![q(&[([2, 0, 0, 0], 1), ([0, 1, 1, 0], -1)]), q(&[([0, 0, 0, 2], 1)])] };
        let rc = rational_components(&red).unwrap();
        assert!(rc.components.is_empty() && !rc.main);
    }

    #[test]
    fn labels_stable_under_coordinate_change() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let p = 7;
        let forms = [
            vec![fp(4, p, &[([1, 0, 1, 0], 1), ([0, 2, 0, 0], -1)]), fp(4, p, &[([0, 1, 0, 1], 1)])],
            vec![fp(4, p, &[([1, 0, 0, 1], 1), ([0, 2, 0, 0], -1)]), fp(4, p, &[([0, 1, 0, 1], 1), ([0, 0, 2, 0], -1)])],
        ];
        for f in forms.iter() {
            let base = classify(&ReducedModel { degree: 4, p, forms: f.clone() }).unwrap();
            for _ in 0..5 {
                let cols: Vec<Vec<u64>> = loop {
                    let c: Vec<Vec<u64>> = (0..4).map(|_| (0..4).map(|_| rng.gen_range(0..p)).collect()).collect();
                    if rank(&c, p) == 4 {
                        break c;
                    }
                };
                let g: Vec<FpPoly> = f.iter().map(|q| q.compose_linear(&cols, p)).collect();
                let r = classify(&ReducedModel { degree: 4, p, forms: g }).unwrap();
                assert_eq!(r.label, base.label);
                assert_eq!(r.segre, base.segre);
            }
        }
    }
}
