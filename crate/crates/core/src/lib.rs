//! K-spectral set constants for dense complex matrices.
//!
//! Given a matrix `A` and a region `Omega` containing its spectrum, the crate
//! computes constants `K` with `||f(A)|| <= K sup_Omega |f|` by several
//! routes: the double-layer kernel bound `c2 + sqrt(c2^2 + c1)`, the Cauchy
//! resolvent integral, closed forms for disk-removal regions, and a Blaschke
//! product lower bound.

pub mod blaschke;
pub mod boundary;
pub mod bounds;
pub mod diagnostics;
pub mod error;
pub mod gallery;
pub mod io;
pub mod matops;
pub mod regions;

pub use error::{Error, LinalgError, MapError, ParseError, PathError, RegionError, Result};
pub use matops::{ComplexMatrix, C64};
