//! Faedo-Galerkin solver for complex second-order parabolic problems whose
//! Robin boundary condition degenerates on part of the boundary.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! numerics: coefficient validation, P1 finite elements, the generalized
//! Hermitian eigenbasis of the energy form, the theta-scheme integrator for
//! the Galerkin system, a priori estimate checks and the embedding-sharpness
//! series. File formats and the command line live in the `noncoercive` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod assembly;
pub mod basis;
pub mod error;
pub mod estimates;
pub mod galerkin;
pub mod linalg;
pub mod mesh;
pub mod problem;
pub mod sharpness;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Point in the plane. One-dimensional problems use `x[0]` and keep `x[1] = 0`.
pub type Point = [f64; 2];
