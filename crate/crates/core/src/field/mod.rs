//! Channel discretization, fields, differential operators and region norms.

mod deriv;
mod fields;
mod grid;
mod norm;
mod region;
mod snapshot;

pub use deriv::{curl2d, d_dx, d_dy, d_dy_profile, divergence2d, VelocityGradient};
pub use fields::{ScalarField, VectorField};
pub use grid::{make_channel_grid, Clustering, Grid, GridSpec};
pub use norm::{lp_norm, parse_exponent};
pub use region::{layer_region, Region};
pub use snapshot::{Snapshot, SNAPSHOT_MAGIC};
