//! Mixed discriminants of positive semidefinite matrices.
//!
//! The crate computes `D(A₁,…,Aₙ)` by two independent algorithms, decides
//! positivity with checkable certificates, implements the L2 calculus of
//! centered ellipsoids, and audits candidate multilinear functionals against
//! the hypotheses that characterize `D` up to a constant factor.
//!
//! Every algorithm is generic over [`Scalar`]: [`Rational`] gives exact
//! results, `f64` gives tolerance-based ones.

#![allow(clippy::needless_range_loop)]

pub mod discriminant;
pub mod ellipsoid;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod positivity;
pub mod sampling;
pub mod scalar;
pub mod subspace;
pub mod suites;

pub use discriminant::{det_expansion, md, md_perm, md_polar, Algorithm, ExpansionCoefficients, MatrixTuple};
pub use ellipsoid::{Ellipsoid, L2Combination, Segment};
pub use error::{Error, Result};
pub use matrix::{column_space, determinant, validate_psd, validate_psd_with_tol, PsdMatrix, SymMatrix};
pub use positivity::{decide, PositivityVerdict};
pub use scalar::{Rational, Scalar, Tolerance};
pub use subspace::{sum_dim, Subspace};
