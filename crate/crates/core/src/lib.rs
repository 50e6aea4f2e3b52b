pub mod battery;
pub mod cli;
pub mod error;
pub mod expr;
pub mod ncalg;
pub mod presentations;
pub mod rewrite;
pub mod rmatrix;
pub mod scalar;

pub use error::{QdcError, Result};
pub use scalar::{Constants, Scalar};
