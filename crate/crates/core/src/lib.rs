//! Exact-arithmetic toolkit for Poisson structures on trivial extension
//! algebras `P0 ⋉ P1`, where `P0` is a rational-coefficient polynomial
//! algebra and `P1` a free `P0`-module.
//!
//! Structures are encoded by their generator data: a skew matrix of
//! structure polynomials for the base bracket, and three tensors
//! (fiber bracket, contravariant derivative, curvature-control tensor)
//! for the extension. Every check is an exact polynomial identity test;
//! every solver runs exact rational linear algebra. Nothing is floating
//! point and nothing is sampled unless a test says so explicitly.

// Index loops throughout mirror the tensor index notation.
#![allow(clippy::needless_range_loop)]

pub mod base;
pub mod ext;
pub mod fiber;
pub mod fixtures;
pub mod gauge;
pub mod linalg;
pub mod manifest;
pub mod parse;
pub mod poly;
pub mod report;
pub mod tensor;

pub use base::{OneForm, PoissonBase};
pub use ext::{ExtDerivation, ExtElem};
pub use fiber::{FiberElem, TripleData};
pub use gauge::GaugeData;
pub use manifest::Manifest;
pub use poly::{Monomial, Poly, Rat};
pub use tensor::{DerivTensor, FormTensor};
