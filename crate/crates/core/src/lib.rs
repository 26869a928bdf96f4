//! Numerical laboratory for the inhomogeneous nonlinear Schrödinger equation
//!
//! ```text
//! i u_t + Δu + |x|^{-b} |u|^{2σ} u = 0
//! ```
//!
//! on a periodized line or on radial grids in `R^N`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod error;
pub mod evolution;
pub mod exact;
pub mod experiments;
pub mod corpus;
pub mod inequalities;
pub mod functionals;
pub mod ground_state;
pub mod linalg;
pub mod model;

pub use error::{InlsError, Result};
pub use model::{Field, Geometry, Grid, Model, ProblemParams, RadialOrder, Regime};
pub use num_complex::Complex64;
