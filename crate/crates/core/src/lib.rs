//! Chebyshev endomorphisms of C^2 and C^3, the morphisms they induce on the
//! dihedral orbit varieties C^2/D3 and C^3/D4, and exact verification of the
//! identities relating them.

pub mod algebra;
pub mod catalog;
pub mod chebyshev;
pub mod dynamics;
pub mod error;
pub mod invariants;
pub mod report;
pub mod suite;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;

pub use algebra::{CycRational, MultiPoly, PolyMap, Scalar};
pub use error::{AlgebraError, LabError, NumericError};

pub type Rational = BigRational;
pub type QPoly = MultiPoly<Rational>;
pub type CycPoly = MultiPoly<CycRational>;
pub type QMap = PolyMap<Rational>;
pub type CycMap = PolyMap<CycRational>;
pub type C64 = Complex<f64>;
pub type C32 = Complex<f32>;

/// `n / d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse a rational polynomial from trusted fixture text.
pub fn qpoly(text: &str) -> QPoly {
    algebra::parse_poly(text, None).unwrap_or_else(|e| panic!("fixture {text:?}: {e}"))
}

/// Like [`qpoly`] but over an explicit variable list.
pub fn qpoly_in(text: &str, vars: &[&str]) -> QPoly {
    algebra::parse_poly(text, Some(vars)).unwrap_or_else(|e| panic!("fixture {text:?}: {e}"))
}
