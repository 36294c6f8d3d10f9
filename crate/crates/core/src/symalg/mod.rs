//! Exact polynomial algebra and polynomial vector-field calculus over ℚ.

mod field;
mod parse;
mod polynomial;

pub use field::{
    determinant, kernel_field, lie_bracket, rational_rank, CompiledField, CompiledMap, EchelonBasis, PolyMap,
    PolyVectorField,
};
pub use parse::{parse_polynomial, parse_rational};
pub use polynomial::{FloatPoly, Monomial, Polynomial};

/// Convenience constructor for an exact rational `num/den`.
pub fn rat(num: i64, den: i64) -> num::BigRational {
    num::BigRational::new(num.into(), den.into())
}
