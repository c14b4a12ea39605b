pub mod cas;
pub mod error;
pub mod flatness;
pub mod oracle;
pub mod properties;
pub mod rings;
pub mod scheme;

pub use error::{Error, Result};
