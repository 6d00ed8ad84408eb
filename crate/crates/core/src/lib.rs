//! One-point Hermitian codes over GF(q²), their subfield subcodes and trace
//! codes over GF(r), and the machinery to check their dimensions.
//!
//! The modules build on each other in order: [`gf`] (the field tower),
//! [`hermitian`] (points and Riemann–Roch bases), [`linalg`] (exact
//! elimination), [`agcode`] (the codes `H(q², s)` and their duals) and
//! [`subfield`] (subcodes, trace codes and the dimension sweeps).

pub mod agcode;
pub mod gf;
pub mod hermitian;
pub mod linalg;
pub mod subfield;
pub mod table1;

pub use agcode::{build_hermitian_code, dual_code, HermitianFamily, LinearCode, Provenance};
pub use gf::{FieldElement, RBasis, Tower};
pub use hermitian::{AffinePoint, HermitianCurve, Monomial};
pub use linalg::{Echelon, Matrix};
