//! Noether currents on a fixed region: Euler-Lagrange equations, bare and
//! improved currents, quasi-symmetry classification, divergence potentials
//! from the field-scaling homotopy, minimal coupling of u(1)
//! quasi-symmetries and numeric verification of on-shell conservation.

pub mod cli;
pub mod error;
pub mod expr;
pub mod gauge;
pub mod homotopy;
pub mod jet;
pub mod noether;
pub mod numverify;

pub use error::{Error, Result};
pub use expr::{parse, print, Expr, FieldSystem, Poly, Symbol};
