//! Elementary transformations used by the local algorithms, and a walker that applies them to a
//! model while accumulating the composite transformation.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactmath::rational::{rat, Rational};
use crate::models::{mat_identity, mat_inverse, mat_transpose, GenusOneModel, Mat, Transformation};
use crate::redgeom::complete_basis;

pub fn ratp(p: u64) -> Rational {
    rat(p as i64, 1)
}

pub fn lift_mat(m: &[Vec<u64>]) -> Mat {
    m.iter().map(|r| r.iter().map(|&a| rat(a as i64, 1)).collect()).collect()
}

pub fn diag(v: &[Rational]) -> Mat {
    let n = v.len();
    (0..n).map(|i| (0..n).map(|j| if i == j { v[i].clone() } else { Rational::zero() }).collect()).collect()
}

/// The transformation substituting x = S x' with identity scaling.
pub fn subst(degree: usize, s: &Mat) -> Transformation {
    let n = mat_transpose(s);
    match degree {
        2 => Transformation::Deg2 { mu: Rational::one(), r: [Rational::zero(), Rational::zero(), Rational::zero()], n },
        3 => Transformation::Deg3 { mu: Rational::one(), n },
        _ => Transformation::Deg4 { m: mat_identity(2), n },
    }
}

/// Degree 2: y <- y + r0 x1^2 + r1 x1 x2 + r2 x2^2.
pub fn shift_y(r: [Rational; 3]) -> Transformation {
    Transformation::Deg2 { mu: Rational::one(), r, n: mat_identity(2) }
}

/// Scaling of the equations: mu for degrees 2 and 3, the matrix M for degree 4.
pub fn scale2(mu: Rational) -> Transformation {
    Transformation::Deg2 { mu, r: [Rational::zero(), Rational::zero(), Rational::zero()], n: mat_identity(2) }
}

pub fn scale3(mu: Rational) -> Transformation {
    Transformation::Deg3 { mu, n: mat_identity(3) }
}

pub fn pencil(m: Mat) -> Transformation {
    Transformation::Deg4 { m, n: mat_identity(4) }
}

/// Scaling of the coordinates x_i <- d_i x_i combined with an equation scaling.
pub fn weighted(degree: usize, d: &[Rational], eq: &[Rational]) -> Transformation {
    let n = diag(d);
    match degree {
        2 => Transformation::Deg2 { mu: eq[0].clone(), r: [Rational::zero(), Rational::zero(), Rational::zero()], n },
        3 => Transformation::Deg3 { mu: eq[0].clone(), n },
        _ => Transformation::Deg4 { m: diag(eq), n },
    }
}

/// Matrix S with the point (last nonzero coordinate 1) as its last column and standard basis
/// vectors elsewhere; S is unimodular.
pub fn point_to_last(pt: &[u64]) -> Mat {
    let n = pt.len();
    let k = (0..n).rev().find(|&i| pt[i] != 0).expect("nonzero point");
    let mut cols: Vec<Vec<Rational>> = (0..n)
        .filter(|&i| i != k)
        .map(|i| (0..n).map(|r| if r == i { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    cols.push(pt.iter().map(|&a| rat(a as i64, 1)).collect());
    mat_transpose(&cols)
}

/// Matrix S = R^{-1} where R has the given independent linear forms (mod p) as its first rows,
/// completed by standard basis vectors; under x = S x' the forms become x'_1, ..., x'_r.
pub fn forms_to_first(rows: &[Vec<u64>], n: usize, p: u64) -> Result<Mat> {
    let basis = complete_basis(rows, n, p);
    if basis.len() != n {
        return Err(Error::Domain("linear forms are dependent modulo p".into()));
    }
    mat_inverse(&lift_mat(&basis))
}

/// As `forms_to_first`, keeping the last coordinate fixed (for affine charts).
pub fn forms_to_first_affine(rows: &[Vec<u64>], n: usize, p: u64) -> Result<Mat> {
    let mut e_last = vec![0u64; n];
    e_last[n - 1] = 1;
    let mut with_last = rows.to_vec();
    with_last.push(e_last.clone());
    let basis = complete_basis(&with_last, n, p);
    if basis.len() != n {
        return Err(Error::Domain("linear forms are dependent modulo p on the chart".into()));
    }
    // Move the last-coordinate row to the end.
    let r = rows.len();
    let mut ordered: Vec<Vec<u64>> = basis[..r].to_vec();
    ordered.extend(basis[r + 1..].iter().cloned());
    ordered.push(e_last);
    mat_inverse(&lift_mat(&ordered))
}

/// Permutation matrix S with x = S x' moving coordinate `c` to the last place.
pub fn chart_permutation(n: usize, c: usize) -> Mat {
    let mut s = mat_identity(n);
    s.swap(c, n - 1);
    s
}

/// A model together with the composite transformation that produced it from the input.
#[derive(Clone, Debug)]
pub struct Walk {
    pub model: GenusOneModel,
    pub g: Transformation,
}

impl Walk {
    pub fn new(model: &GenusOneModel) -> Self {
        Walk { model: model.clone(), g: Transformation::identity(model.degree()) }
    }

    pub fn then(&self, step: &Transformation) -> Result<Walk> {
        Ok(Walk { model: step.apply(&self.model)?, g: step.compose(&self.g)? })
    }
}

/// The scaling that makes a model integral (clearing denominators).
pub fn clear_denominators(model: &GenusOneModel) -> Transformation {
    use num_integer::Integer;
    let lcm = |v: &[Rational]| v.iter().fold(num_bigint::BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let forms = model.coeffs();
    match model {
        GenusOneModel::Deg2 { .. } => scale2(Rational::from_integer(lcm(&forms))),
        GenusOneModel::Deg3 { .. } => scale3(Rational::from_integer(lcm(&forms))),
        GenusOneModel::Deg4 { .. } => {
            pencil(diag(&[Rational::from_integer(lcm(&forms[..10])), Rational::from_integer(lcm(&forms[10..]))]))
        }
    }
}
