//! Per-mode helpers shared by the two solvers. Spectral arrays use the
//! `j * nx + m` layout of [`Grid::rows_to_spectral`].

use std::sync::Arc;

use rustfft::num_complex::Complex64;

use super::state::FlowState;
use crate::error::{Error, Result};
use crate::field::Grid;

pub const CFL_NUMBER: f64 = 0.4;

pub(crate) fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Modes `0 ..= nx/2` carry the independent data; the rest mirror them.
pub(crate) fn independent_modes(nx: usize) -> usize {
    nx / 2 + 1
}

/// Restores conjugate symmetry and clears the Nyquist bin.
pub(crate) fn symmetrize(grid: &Grid, modes: &mut [Complex64]) {
    let nx = grid.nx();
    for row in modes.chunks_mut(nx) {
        row[0].im = 0.0;
        if nx.is_multiple_of(2) {
            row[nx / 2] = zero();
        }
        for m in 1..nx.div_ceil(2) {
            row[nx - m] = row[m].conj();
        }
    }
}

/// Zeroes `|m| > nx/3`.
pub(crate) fn dealias(grid: &Grid, modes: &mut [Complex64]) {
    let nx = grid.nx();
    let keep = nx / 3;
    for row in modes.chunks_mut(nx) {
        for (m, c) in row.iter_mut().enumerate() {
            if m > keep && nx - m > keep {
                *c = zero();
            }
        }
    }
}

pub(crate) fn dx_modes(grid: &Grid, modes: &[Complex64]) -> Vec<Complex64> {
    let nx = grid.nx();
    modes
        .iter()
        .enumerate()
        .map(|(idx, &c)| c * Complex64::new(0.0, grid.wavenumber(idx % nx)))
        .collect()
}

pub(crate) fn dy_modes(grid: &Grid, modes: &[Complex64]) -> Vec<Complex64> {
    let nx = grid.nx();
    let mut out = vec![zero(); modes.len()];
    for j in 0..grid.ny() {
        let st = grid.d1_stencil(j);
        for m in 0..nx {
            let mut acc = zero();
            for (r, &c) in st.coef.iter().enumerate() {
                acc += modes[(st.start + r) * nx + m] * c;
            }
            out[j * nx + m] = acc;
        }
    }
    out
}

/// `u = (∂y ψ, −∂x ψ)` in physical space from spectral `ψ`.
pub(crate) fn velocity_from_stream(grid: &Grid, psi: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    let u1 = grid.rows_from_spectral(dy_modes(grid, psi));
    let mut u2 = grid.rows_from_spectral(dx_modes(grid, psi));
    for v in &mut u2 {
        *v = -*v;
    }
    (u1, u2)
}

/// `û·∇ω̂` evaluated in physical space and returned dealiased in spectral space.
pub(crate) fn advection(grid: &Grid, u1: &[f64], u2: &[f64], omega: &[Complex64]) -> Vec<Complex64> {
    let wx = grid.rows_from_spectral(dx_modes(grid, omega));
    let wy = grid.rows_from_spectral(dy_modes(grid, omega));
    let prod: Vec<f64> = (0..u1.len()).map(|k| u1[k] * wx[k] + u2[k] * wy[k]).collect();
    let mut n = grid.rows_to_spectral(&prod);
    dealias(grid, &mut n);
    symmetrize(grid, &mut n);
    n
}

/// Advective time-step limit `0.4·min(dx/max|u1|, dy_min/max|u2|)`.
pub(crate) fn cfl_limit(grid: &Grid, u1: &[f64], u2: &[f64]) -> f64 {
    let a = u1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let b = u2.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let lim1 = if a > 0.0 { grid.dx() / a } else { f64::INFINITY };
    let lim2 = if b > 0.0 { grid.dy_min() / b } else { f64::INFINITY };
    CFL_NUMBER * lim1.min(lim2)
}

pub(crate) fn check_dt(t: f64, dt: f64, limit: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    if dt > limit {
        return Err(Error::Cfl { t, dt, limit });
    }
    Ok(())
}

pub(crate) fn check_finite(t: f64, what: &str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            t,
            what: what.into(),
        })
    }
}

pub(crate) fn state_from_parts(grid: &Arc<Grid>, t: f64, nu: f64, u1: Vec<f64>, u2: Vec<f64>) -> Result<FlowState> {
    use crate::field::{ScalarField, VectorField};
    check_finite(t, "velocity", &u1)?;
    check_finite(t, "velocity", &u2)?;
    let vel = VectorField {
        comp1: ScalarField::from_values_unchecked(grid, u1),
        comp2: ScalarField::from_values_unchecked(grid, u2),
    };
    FlowState::new(t, nu, vel)
}
