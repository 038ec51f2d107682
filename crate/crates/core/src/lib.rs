//! Computational workbench for Coxeter polygons in the hyperbolic plane.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod io;
pub mod kernel;
pub mod polygon;
pub mod refgroup;
pub mod surgery;
pub mod thinpart;
pub mod tolerance;
pub mod triangulation;
pub mod verify;

pub use error::{Error, Result};
