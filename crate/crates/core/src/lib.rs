//! Numerical tools for linear matrix pencils `A + lambda B`: Kronecker
//! structure, singularity tests, Taylor spectra of commuting pairs, joint
//! numerical ranges, and the intertwiner equation `AMB = BMA`.

pub mod commuting;
pub mod corpus;
pub mod error;
pub mod kronecker;
pub mod linalg;
pub mod numrange;
pub mod pencil;
pub mod random;
pub mod taylor;

pub use error::{Error, Result};
pub use linalg::{CMatrix, ToleranceConfig};
pub use pencil::Pencil;

pub type C64 = num_complex::Complex64;
