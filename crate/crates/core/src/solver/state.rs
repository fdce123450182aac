use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{curl2d, Grid, ScalarField, VectorField};

/// Snapshot of a flow: time, viscosity (0 for Euler), velocity and its vorticity.
#[derive(Clone, Debug)]
pub struct FlowState {
    pub t: f64,
    pub nu: f64,
    pub velocity: VectorField,
    pub vorticity: ScalarField,
}

impl FlowState {
    /// Builds a state whose vorticity is the discrete curl of `velocity`.
    pub fn new(t: f64, nu: f64, velocity: VectorField) -> Result<Self> {
        if !(t.is_finite() && nu >= 0.0 && nu.is_finite()) {
            return Err(Error::invalid(format!("bad state header t={t}, nu={nu}")));
        }
        if !velocity.is_finite() {
            return Err(Error::NonFinite {
                t,
                what: "velocity".into(),
            });
        }
        let vorticity = curl2d(&velocity);
        Ok(FlowState {
            t,
            nu,
            velocity,
            vorticity,
        })
    }

    pub fn rest(grid: &Arc<Grid>, nu: f64) -> Self {
        FlowState {
            t: 0.0,
            nu,
            velocity: VectorField::zeros(grid),
            vorticity: ScalarField::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.velocity.grid()
    }

    /// `‖u‖²` over the channel.
    pub fn energy(&self) -> f64 {
        self.velocity.energy()
    }

    /// Tangential velocity on the wall row.
    pub fn wall_trace(&self) -> &[f64] {
        self.velocity.comp1.row(0)
    }

    /// Largest `|u|` on the wall row, for the given components.
    pub(crate) fn wall_magnitude(&self, tangential: bool) -> f64 {
        let normal = self.velocity.comp2.row(0).iter().map(|v| v.abs());
        if tangential {
            normal
                .chain(self.velocity.comp1.row(0).iter().map(|v| v.abs()))
                .fold(0.0, f64::max)
        } else {
            normal.fold(0.0, f64::max)
        }
    }

    pub(crate) fn max_speed(&self) -> f64 {
        self.velocity
            .comp1
            .values()
            .iter()
            .chain(self.velocity.comp2.values())
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}
