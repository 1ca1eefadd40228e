//! Exact computer algebra for higher-derivation descent over characteristic-p
//! Laurent rings and for Lubin-Tate formal groups over ramified p-adic fields.

pub mod check;
pub mod error;
pub mod expr;
pub mod ff;
pub mod graded;
pub mod hasse;
pub mod lubin_tate;
pub mod padic;
pub mod picard;
pub mod random;
pub mod ring;
pub mod series;
pub mod trunc;

pub use error::{Error, Result};
