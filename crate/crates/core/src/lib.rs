//! Numerical verification of soliton-type curvature identities on
//! coordinate charts.
//!
//! Metrics and fields are closed-form expressions over named coordinates.
//! Every derivative is taken exactly with truncated Taylor jets, so the
//! residuals reported by the checks reflect the identities themselves and
//! floating-point round-off, not discretisation error.

pub mod cli;
pub mod error;
pub mod exprjet;
pub mod geometry;
pub mod oracle;
pub mod soliton;
pub mod warp;

pub use error::{Error, Result};
