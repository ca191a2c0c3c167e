// Range checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod dissipative;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod levels;
pub mod linalg;
pub mod maps;
pub mod protocols;
pub mod scenario;

pub use error::{Error, Result};
