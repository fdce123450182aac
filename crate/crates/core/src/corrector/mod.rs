//! Divergence-free boundary-layer correctors that cancel the Euler slip trace.

mod curved;
mod flat;
mod mollifier;
mod scaling;

pub use curved::{curved_corrector, curved_divergence, curved_gamma, curved_gamma_deficit_ln, CurvedChart};
pub use flat::{
    corrector_time_derivative, flat_corrector, flat_corrector_wall_gradient, tau, CorrectorParams, CorrectorRate,
    Trace,
};
pub use mollifier::{make_mollifier, Mollifier, SmoothCutoff};
pub use scaling::{verify_corrector_scalings, CorrectorQuantity, ScalingReport, ScalingRow};
