//! Incompressible Euler by vorticity transport, explicit RK4 in time.
//! `ψ = 0` on the wall, `ψ = Q` (the conserved flux) on the slip lid.

use std::sync::Arc;

use rustfft::num_complex::Complex64;

use super::banded::{BandLu, BandMatrix};
use super::spectral::{
    advection, cfl_limit, check_dt, check_finite, independent_modes, state_from_parts, symmetrize,
    velocity_from_stream, zero,
};
use super::state::FlowState;
use crate::error::{Error, Result};
use crate::field::Grid;

const WALL_TOL: f64 = 1e-10;

#[derive(Clone)]
pub struct EulerSolver {
    grid: Arc<Grid>,
    t: f64,
    flux: f64,
    omega: Vec<Complex64>,
    poisson: Arc<Vec<BandLu>>,
}

impl std::fmt::Debug for EulerSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EulerSolver").field("t", &self.t).field("flux", &self.flux).finish()
    }
}

impl EulerSolver {
    pub fn new(state: &FlowState) -> Result<Self> {
        let grid = state.grid().clone();
        if grid.ny() < 3 {
            return Err(Error::invalid("Euler needs at least 3 wall-normal nodes"));
        }
        if state.wall_magnitude(false) > WALL_TOL * (1.0 + state.max_speed()) {
            return Err(Error::invalid("Euler state must have zero normal velocity on the wall"));
        }
        let nx = grid.nx();
        let mean_u1: Vec<f64> = (0..grid.ny())
            .map(|j| state.velocity.comp1.row(j).iter().sum::<f64>() / nx as f64)
            .collect();
        let flux = mean_u1.iter().zip(grid.y_weights()).map(|(u, w)| u * w).sum();
        let mut omega = grid.rows_to_spectral(state.vorticity.values());
        symmetrize(&grid, &mut omega);
        let poisson = (0..independent_modes(nx))
            .map(|m| poisson_matrix(&grid, grid.wavenumber(m)).factor())
            .collect::<Result<Vec<_>>>()?;
        Ok(EulerSolver {
            grid,
            t: state.t,
            flux,
            omega,
            poisson: Arc::new(poisson),
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Conserved volume flux `∫ ū1 dy` per unit period.
    pub fn flux(&self) -> f64 {
        self.flux
    }

    fn stream(&self, omega: &[Complex64]) -> Vec<Complex64> {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let mut psi = vec![zero(); nx * ny];
        let mut col = vec![zero(); ny];
        for (m, lu) in self.poisson.iter().enumerate() {
            for j in 1..ny - 1 {
                col[j] = -omega[j * nx + m];
            }
            col[0] = zero();
            col[ny - 1] = if m == 0 {
                Complex64::new(self.flux * nx as f64, 0.0)
            } else {
                zero()
            };
            lu.solve_in_place(&mut col);
            for j in 0..ny {
                psi[j * nx + m] = col[j];
            }
        }
        symmetrize(&self.grid, &mut psi);
        psi
    }

    fn rate(&self, omega: &[Complex64]) -> (Vec<Complex64>, f64) {
        let psi = self.stream(omega);
        let (u1, u2) = velocity_from_stream(&self.grid, &psi);
        let limit = cfl_limit(&self.grid, &u1, &u2);
        let mut n = advection(&self.grid, &u1, &u2, omega);
        n.iter_mut().for_each(|v| *v = -*v);
        (n, limit)
    }

    pub fn state(&self) -> Result<FlowState> {
        let psi = self.stream(&self.omega);
        let (u1, mut u2) = velocity_from_stream(&self.grid, &psi);
        let nx = self.grid.nx();
        u2[..nx].iter_mut().for_each(|v| *v = 0.0);
        state_from_parts(&self.grid, self.t, 0.0, u1, u2)
    }

    pub fn max_vorticity(&self) -> f64 {
        self.grid
            .rows_from_spectral(self.omega.clone())
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn step(&mut self, dt: f64) -> Result<()> {
        let axpy = |a: &[Complex64], b: &[Complex64], s: f64| -> Vec<Complex64> {
            a.iter().zip(b).map(|(&x, &y)| x + y * s).collect()
        };
        let (k1, limit) = self.rate(&self.omega);
        check_dt(self.t, dt, limit)?;
        let (k2, _) = self.rate(&axpy(&self.omega, &k1, 0.5 * dt));
        let (k3, _) = self.rate(&axpy(&self.omega, &k2, 0.5 * dt));
        let (k4, _) = self.rate(&axpy(&self.omega, &k3, dt));
        let next: Vec<Complex64> = (0..self.omega.len())
            .map(|i| self.omega[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0))
            .collect();
        self.t += dt;
        check_finite(self.t, "vorticity", &self.grid.rows_from_spectral(next.clone()))?;
        self.omega = next;
        Ok(())
    }
}

/// `(D2 − k²)ψ = −ω` on interior nodes with Dirichlet rows at both walls.
fn poisson_matrix(grid: &Grid, k: f64) -> BandMatrix {
    let ny = grid.ny();
    let mut a = BandMatrix::zeros(ny, 1, 1);
    a.set(0, 0, 1.0);
    a.set(ny - 1, ny - 1, 1.0);
    for j in 1..ny - 1 {
        let d2 = grid.d2_coef(j);
        a.set(j, j - 1, d2[0]);
        a.set(j, j, d2[1] - k * k);
        a.set(j, j + 1, d2[2]);
    }
    a
}

/// One RK4 Euler step from `state`.
pub fn euler_step(state: &FlowState, dt: f64) -> Result<FlowState> {
    let mut solver = EulerSolver::new(state)?;
    solver.step(dt)?;
    solver.state()
}
