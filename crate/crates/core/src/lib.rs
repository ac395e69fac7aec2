//! Fourier analysis on the hyperboloid model of real hyperbolic space H^d.

pub mod error;
pub mod geometry;
pub mod jet;
pub mod norms;
pub mod operators;
pub mod quadrature;
pub mod specfun;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::ModelParams;
