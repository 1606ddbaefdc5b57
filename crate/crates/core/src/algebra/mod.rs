//! Exact coefficient fields, sparse polynomials, elimination and linear solving.

pub mod elimination;
pub mod json;
pub mod linear;
pub mod map;
pub mod numeric;
pub mod poly;
pub mod scalar;
pub mod text;

pub use elimination::{
    determinant, discriminant, factor_multiplicity, remainder_in, resultant, squarefree_part, sylvester_matrix,
    univariate_gcd,
};
pub use json::{from_json, to_json, PolyJson};
pub use linear::{solve_exact_linear, LinearError};
pub use map::{CompiledMap, MapJson, PolyMap};
pub use poly::{canonical_vars, HornerTree, Monomial, MultiPoly};
pub use scalar::{CycRational, Scalar};
pub use text::{parse_poly, to_text};
