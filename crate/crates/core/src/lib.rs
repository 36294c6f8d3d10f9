//! Symbolic and numerical tools for multilinear Radon-like transforms built
//! from polynomial submersions `π_j : ℝⁿ → ℝⁿ⁻¹`.
//!
//! The crate is layered bottom-up:
//!
//! * [`symalg`]: exact polynomials over ℚ, vector fields, Lie brackets,
//!   kernel fields of submersions and symbolic determinants.
//! * [`words`]: bracket words, the recursive word-field catalog, bracket-tree
//!   expansion, Hörmander span checks and the `Λ` vector.
//! * [`polytope`]: the Newton polytope with exact LP membership, interior and
//!   separation queries.
//! * [`exponents`]: the `p ↔ b(p)` correspondence and exponent classification.
//! * [`flows`]: RK4 flows, Carnot–Carathéodory ball sampling, occupancy-grid
//!   volumes, projection measures, the exponential chart and the necessity
//!   witness.

pub mod error;
pub mod exponents;
pub mod flows;
pub mod polytope;
pub mod symalg;
pub mod words;

pub use error::{Error, ErrorClass, Result};
pub use exponents::{classify, Classification, Exponent, ExponentTuple, Verdict};
pub use polytope::{NewtonPolytope, SeparatingFunctional};
pub use symalg::{PolyMap, PolyVectorField, Polynomial};
pub use words::{BracketTree, Catalog, CatalogCaps, Degree, LambdaVector, Word, WordCombination, WordTuple};

pub use num::BigRational;
