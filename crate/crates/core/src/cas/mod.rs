//! Exact polynomial arithmetic and Gröbner bases.

pub mod groebner;
pub mod ideal;
pub mod monomial;
mod parse;
pub mod poly;
pub mod scalar;

pub use groebner::{with_budget, Budget, GroebnerBasis};
pub use ideal::Ideal;
pub use monomial::{Monomial, MonomialOrder};
pub use poly::{Poly, PolyRing};
pub use scalar::{Field, Scalar};
