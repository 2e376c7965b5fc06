//! Genus one models of degree 2, 3 and 4 over Q: invariants, covering maps, local solubility,
//! Tamagawa distances, real-place extrema and explicit height bounds for n-coverings.

pub mod error;
pub mod exactmath;
pub mod models;
pub mod covering;
pub mod redgeom;
pub mod steps;
pub mod localsolve;
pub mod tamagawa;
pub mod realplace;
pub mod heights;
pub mod cli;

pub use error::{Error, Result};
