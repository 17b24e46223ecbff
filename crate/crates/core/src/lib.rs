//! Tensor-product Veronese immersions of sphere products into the unit ball.
//!
//! The crate computes the exact maximal normal curvature of the immersion
//! attached to a finitely supported measure on `N_0^M` (through a
//! copositivity criterion), searches for curvature-minimizing measures,
//! builds explicit immersions for sampling, and evaluates the intrinsic and
//! conformal curvature quantities used to certify curvature bounds.

// Dense matrices are indexed by (row, column) throughout.
#![allow(clippy::needless_range_loop)]

pub mod certifier;
pub mod cli;
pub mod copositivity;
pub mod error;
pub mod exact;
pub mod immersion;
pub mod measure;
pub mod optimizer;
pub mod report;
pub mod spectral;

pub use error::{Error, Result};
