//! Takagi-Sugeno model reference control for the NREL 5 MW reference turbine.
//!
//! The crate is `no_std` (with `alloc`) and carries everything numeric:
//! nonlinear drive-train models, operating-point linearization, a small
//! dense SDP solver, LMI-based PDC gain synthesis with eigenvalue and
//! H-infinity verification, and the closed-loop simulator. File formats
//! and the command line live in the `tsmrc` crate.
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN fails parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod linalg;
pub mod mrc;
pub mod sdp;
pub mod sim;
pub mod ts;
pub mod turbine;

pub use error::{Error, Result};
