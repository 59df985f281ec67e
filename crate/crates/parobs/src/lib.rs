//! Numerical laboratory for parabolic obstacle problems.
//!
//! Four prototypes (thick, Signorini, dynamic thin, fractional) are solved by
//! an exponential-penalty backward-Euler march and cross-checked against
//! projected-relaxation complementarity solvers. The diagnostics layer
//! measures the quantities the regularity theory of these problems is about:
//! quasi-convexity margins, moduli of continuity of the time derivative,
//! Gaussian monotonicity functionals, a slit eigenvalue, free-boundary
//! geometry, and hyperbolic blow-up profiles.

pub mod acceptance;
pub mod builtin;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod io;
pub mod penalty;
pub mod reference;
pub mod solvers;

pub use error::{Error, Result};
