//! Conformal invariants, hyperbolic-type metrics, modulus-of-continuity
//! transfer functions and quasiconformal distortion bounds.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod balls;
pub mod chart;
pub mod distortion;
pub mod error;
pub mod exec;
pub mod harmonic;
pub mod quad;
pub mod roots;
pub mod metrics;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Exec;
pub use special::{Dimension, Interval};
