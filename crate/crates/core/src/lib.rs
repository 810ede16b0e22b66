//! Multistatic FMCW radar simulation and joint-sparse target recovery.
//!
//! The crate synthesizes baseband chirp measurements for a set of bistatic
//! TX/RX pairs, builds delay-Doppler dictionaries over a location/velocity
//! grid, and recovers the common support of the per-pair target vectors with
//! block matching pursuit ([`pursuit::bmp_run`]), its factorized variant
//! ([`pursuit::fbmp_run`]) and the iteratively corrected factorized variant
//! ([`pursuit::ifbmp_run`]).
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

// `!(x > 0.0)` style checks reject NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dictionary;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod io;
pub mod pursuit;
pub mod rng;
pub mod signal;

pub use error::{Error, Result};
pub use num_complex::Complex64;
