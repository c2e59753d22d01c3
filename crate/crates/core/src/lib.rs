//! Numerical toolkit for multiplier algebras of complete Nevanlinna-Pick
//! kernels on subsets of the unit ball.

pub mod ball;
pub mod cli;
pub mod curve;
pub mod error;
pub mod kernel;
pub mod pick;
pub mod sampling;
pub mod sequences;

pub use error::{Error, Result};
pub use kernel::{BallPoint, HermitianMatrix, PsdCertificate};
