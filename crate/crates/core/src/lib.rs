//! Simulation and verification of first-passage exponents for strictly
//! α-stable Lévy processes and their homogeneous additive functionals.
//!
//! The crate is `no_std` (it needs `alloc`). Orchestration over many paths,
//! file formats and the command-line front end live in `persistence-lab`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod functionals;
pub mod kernels;
pub mod specfun;
pub mod stable;
pub mod stats;
pub mod tail;

pub use error::{Error, Result};
pub use functionals::FunctionalParams;
pub use kernels::Grid;
pub use stable::{PathGrid, RngStream, StableParams};
pub use tail::{ExponentFit, SurvivalCurve};
