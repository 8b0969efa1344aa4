//! Weighted Cauchy-type kernels, the operators `L_ω` and the norms of the
//! associated weighted spaces on the disc, the plane and the upper half-plane.

pub mod error;
pub mod functions;
pub mod grammar;
pub mod harness;
pub mod kernels;
pub mod moments;
pub mod norms;
pub mod operators;
pub mod quadrature;
pub mod special;
pub mod weights;

pub use error::{Error, Result};
