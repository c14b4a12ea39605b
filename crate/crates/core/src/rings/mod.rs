//! Finitely presented algebras, ring maps between them, and finitely
//! presented modules.

pub mod algebra;
pub mod module;
pub mod ringmap;

pub use algebra::{FpAlgebra, Simplified, Tensor};
pub use module::PresentedModule;
pub use ringmap::{FiniteWitness, Image, RingMap};
