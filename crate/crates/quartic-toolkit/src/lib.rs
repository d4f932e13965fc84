//! Exact and asymptotic enumeration, polytope volumes, orthogonal polynomials
//! for quartic weights, determinant identities and saddle-point quadrature.

pub mod asym_enum;
pub mod cli;
pub mod detkit;
pub mod error;
pub mod exact_count;
pub mod numkit;
pub mod orthopoly;
pub mod partition;
pub mod polytope;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result};
