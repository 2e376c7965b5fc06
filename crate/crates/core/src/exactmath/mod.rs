//! Exact arithmetic substrate: rationals, valuations, polynomials, finite fields and real roots.

pub mod ff;
pub mod mpoly;
pub mod rational;
pub mod realroots;

pub use ff::{Fe, Fq, UPoly};
pub use mpoly::{det_bareiss, det_cofactor, min_valuation_of_poly, monomials, resultant, Coeff, MPoly, Mono, QPoly, ZPoly};
pub use rational::{parse_rational, rat, valuation_of, Rational, Valuation};
pub use realroots::{real_roots, IsolatingInterval};
