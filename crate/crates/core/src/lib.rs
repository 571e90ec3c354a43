//! Numerical laboratory for the regional fractional Laplacian `(-Delta)^s_Omega`:
//! critical boundary exponents, the angular eigenproblem, principal-value
//! evaluation, Galerkin energy minimizers on an interval and on the disk, and
//! fits of the boundary expansion.

pub mod angular;
pub mod cli;
pub mod disk;
pub mod error;
pub mod expansion;
pub mod exponents;
pub mod galerkin;
pub mod mesh;
pub mod operator;
pub mod quadrature;
pub mod report;
pub mod selftest;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
