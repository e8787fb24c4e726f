//! Hyperbolic spin Ruijsenaars-Schneider models on the trivial Lie
//! groupoid over the Cartan of SL(N+1), with a dynamical r-matrix of
//! coth type, the associated Poisson bracket, direct integration of the
//! Hamilton equations, and an exact factorization solver built on a
//! branch-continuous eigendecomposition.

pub mod checks;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod factorization;
pub mod groupoid;
pub mod lie_typea;
pub mod linalg;
pub mod rmatrix;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};

/// Default real scalar used by the CLI and most tests.
pub type F = f64;
/// Complex scalar over the default real type.
pub type C64 = Cx<f64>;
pub type C32 = Cx<f32>;
