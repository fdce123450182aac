//! Numerical laboratory for the vanishing-viscosity limit of wall-bounded 2D flow.
//!
//! The crate provides a periodic channel discretization ([`field`]),
//! divergence-free boundary-layer correctors ([`corrector`]), paired
//! Navier-Stokes / Euler solvers ([`solver`]), evaluation of one-sided
//! layer criteria on computed flows ([`criteria`]), error and energy-budget
//! diagnostics ([`analysis`]) and a sweep harness with a CLI ([`harness`]).

pub mod analysis;
pub mod corrector;
pub mod criteria;
pub mod error;
pub mod field;
pub mod harness;
pub mod quad;
pub mod solver;

pub use error::{Error, Result};
