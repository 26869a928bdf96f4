//! Parameters, grids, fields and the primitives shared by every module.

pub mod field;
pub mod grid;
pub mod io;
pub mod ops;
pub mod params;
pub mod quadrature;

pub use field::{Field, Model};
pub use grid::{ball_volume, sphere_area, Geometry, Grid, RadialOrder};
pub use io::{read_field, write_field, Manifest};
pub use ops::{gradient, interpolate, laplacian, rescale};
pub use params::{sigma_star, ProblemParams, Regime};
