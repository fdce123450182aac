//! Navier–Stokes in vorticity–streamfunction form: Adams–Bashforth advection,
//! Crank–Nicolson diffusion, and a coupled per-mode solve that imposes
//! `ψ = ∂y ψ = 0` on the wall. The lid `y = Ly` is stress-free.

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

/// Relative size of wall velocity accepted as "zero" on input.
const WALL_TOL: f64 = 1e-10;

#[derive(Clone)]
struct Factorization {
    key: u64,
    modes: Arc<Vec<BandLu>>,
}

/// Stateful NS integrator: keeps `(ω, ψ)` in spectral form and the previous
/// advection term for the multistep update.
#[derive(Clone)]
pub struct NsSolver {
    grid: Arc<Grid>,
    nu: f64,
    t: f64,
    omega: Vec<Complex64>,
    psi: Vec<Complex64>,
    history: Option<(f64, Vec<Complex64>)>,
    cache: Vec<Factorization>,
}

impl std::fmt::Debug for NsSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NsSolver").field("nu", &self.nu).field("t", &self.t).finish()
    }
}

impl NsSolver {
    /// Projects `state` onto the discrete no-slip space and prepares to step.
    pub fn new(state: &FlowState) -> Result<Self> {
        let grid = state.grid().clone();
        if !(state.nu > 0.0) {
            return Err(Error::invalid("Navier-Stokes needs nu > 0"));
        }
        if grid.ny() < 4 {
            return Err(Error::invalid("Navier-Stokes needs at least 4 wall-normal nodes"));
        }
        let scale = 1.0 + state.max_speed();
        if state.wall_magnitude(true) > WALL_TOL * scale {
            return Err(Error::invalid("Navier-Stokes state must vanish on the wall"));
        }
        let psi = stream_from_velocity(&grid, state);
        let omega = vorticity_from_stream(&grid, &psi);
        Ok(NsSolver {
            grid,
            nu: state.nu,
            t: state.t,
            omega,
            psi,
            history: None,
            cache: Vec::new(),
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> Result<FlowState> {
        let (mut u1, u2) = velocity_from_stream(&self.grid, &self.psi);
        let nx = self.grid.nx();
        u1[..nx].iter_mut().for_each(|v| *v = 0.0);
        state_from_parts(&self.grid, self.t, self.nu, u1, u2)
    }

    /// Largest `|ω|` of the internal vorticity.
    pub fn max_vorticity(&self) -> f64 {
        self.grid
            .rows_from_spectral(self.omega.clone())
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    fn factors(&mut self, c: f64) -> Result<Arc<Vec<BandLu>>> {
        let key = c.to_bits();
        if let Some(f) = self.cache.iter().find(|f| f.key == key) {
            return Ok(f.modes.clone());
        }
        let modes: Vec<BandLu> = (0..independent_modes(self.grid.nx()))
            .map(|m| coupled_matrix(&self.grid, self.grid.wavenumber(m), c).factor())
            .collect::<Result<_>>()?;
        let modes = Arc::new(modes);
        if self.cache.len() >= 4 {
            self.cache.remove(0);
        }
        self.cache.push(Factorization {
            key,
            modes: modes.clone(),
        });
        Ok(modes)
    }

    fn advection_now(&self, omega: &[Complex64], psi: &[Complex64]) -> (Vec<Complex64>, f64) {
        let (u1, u2) = velocity_from_stream(&self.grid, psi);
        let limit = cfl_limit(&self.grid, &u1, &u2);
        (advection(&self.grid, &u1, &u2, omega), limit)
    }

    /// θ-scheme diffusion from `from` over `dt` with the explicit advection `n`.
    fn implicit_update(
        &mut self,
        from: &[Complex64],
        dt: f64,
        theta: f64,
        n: &[Complex64],
    ) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let c = theta * self.nu * dt;
        let ce = (1.0 - theta) * self.nu * dt;
        let lus = self.factors(c)?;
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let mut omega = vec![zero(); nx * ny];
        let mut psi = vec![zero(); nx * ny];
        let mut rhs = vec![zero(); 2 * ny];
        for (m, lu) in lus.iter().enumerate() {
            let k2 = self.grid.wavenumber(m).powi(2);
            rhs.iter_mut().for_each(|v| *v = zero());
            for j in 1..ny - 1 {
                let d2 = self.grid.d2_coef(j);
                let w = |jj: usize| from[jj * nx + m];
                let lap = w(j - 1) * d2[0] + w(j) * d2[1] + w(j + 1) * d2[2] - w(j) * k2;
                rhs[2 * j] = w(j) + lap * ce - n[j * nx + m] * dt;
            }
            lu.solve_in_place(&mut rhs);
            for j in 0..ny {
                omega[j * nx + m] = rhs[2 * j];
                psi[j * nx + m] = rhs[2 * j + 1];
            }
        }
        symmetrize(&self.grid, &mut omega);
        symmetrize(&self.grid, &mut psi);
        Ok((omega, psi))
    }

    /// One step of size `dt`. Later steps are AB2 / Crank–Nicolson (AB2 with
    /// variable step if `dt` changes). The first step takes its advection from
    /// a half-step predictor and its diffusion from two implicit-Euler half
    /// steps, which damps the stiff modes excited by incompatible data.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        let (n_now, limit) = self.advection_now(&self.omega, &self.psi);
        check_dt(self.t, dt, limit)?;
        let current = self.omega.clone();
        let (omega, psi) = match &self.history {
            Some((dt_prev, n_prev)) => {
                let r = dt / dt_prev;
                let n_star: Vec<Complex64> = n_now
                    .iter()
                    .zip(n_prev)
                    .map(|(&a, &b)| a * (1.0 + 0.5 * r) - b * (0.5 * r))
                    .collect();
                self.implicit_update(&current, dt, 0.5, &n_star)?
            }
            None => {
                let (w_half, p_half) = self.implicit_update(&current, 0.5 * dt, 0.5, &n_now)?;
                let n_mid = self.advection_now(&w_half, &p_half).0;
                let (w1, _) = self.implicit_update(&current, 0.5 * dt, 1.0, &n_mid)?;
                self.implicit_update(&w1, 0.5 * dt, 1.0, &n_mid)?
            }
        };
        self.t += dt;
        let probe = self.grid.rows_from_spectral(omega.clone());
        check_finite(self.t, "vorticity", &probe)?;
        self.omega = omega;
        self.psi = psi;
        self.history = Some((dt, n_now));
        Ok(())
    }
}

/// Coupled system for one Fourier mode; unknowns are interleaved as `(ω_j, ψ_j)`.
///
/// `k ≠ 0` rows: `0` ψ'(0)=0, `1` ψ_0=0, `2j` ω-update, `2j+1` Poisson, last two
/// ω_top = 0 and ψ_top = 0.
/// `k = 0` rows: `0` ω'(0)=0 (no mean pressure gradient), `1` ψ'(0)=0, `3` ψ_0=0,
/// `2j` ω-update, `2j+3` Poisson at node `j`, `2ny-2` ω_top = 0; ψ_top is free.
fn coupled_matrix(grid: &Grid, k: f64, c: f64) -> BandMatrix {
    let ny = grid.ny();
    let n = 2 * ny;
    let mut a = BandMatrix::zeros(n, 4, 5);
    let k2 = k * k;
    let w = |j: usize| 2 * j;
    let p = |j: usize| 2 * j + 1;
    let wall = grid.d1_stencil(0);
    for j in 1..ny - 1 {
        let d2 = grid.d2_coef(j);
        let row = 2 * j;
        a.set(row, w(j - 1), -c * d2[0]);
        a.set(row, w(j), 1.0 + c * k2 - c * d2[1]);
        a.set(row, w(j + 1), -c * d2[2]);
    }
    a.set(w(ny - 1), w(ny - 1), 1.0);
    let poisson_row = |j: usize| if k == 0.0 { 2 * j + 3 } else { 2 * j + 1 };
    for j in 1..ny - 1 {
        let d2 = grid.d2_coef(j);
        let row = poisson_row(j);
        a.set(row, p(j - 1), d2[0]);
        a.set(row, p(j), d2[1] - k2);
        a.set(row, p(j + 1), d2[2]);
        a.set(row, w(j), 1.0);
    }
    if k == 0.0 {
        for (r, &cf) in wall.coef.iter().enumerate() {
            a.set(0, w(wall.start + r), cf);
            a.set(1, p(wall.start + r), cf);
        }
        a.set(3, p(0), 1.0);
    } else {
        for (r, &cf) in wall.coef.iter().enumerate() {
            a.set(0, p(wall.start + r), cf);
        }
        a.set(1, p(0), 1.0);
        a.set(p(ny - 1), p(ny - 1), 1.0);
    }
    a
}

/// Stream function of a wall-vanishing velocity: `ψ̂ = i û2 / k` for `k ≠ 0`,
/// cumulative trapezoid of the mean `u1` for `k = 0`, then `ψ_0 = 0`,
/// `∂y ψ(0) = 0` and (for `k ≠ 0`) `ψ_top = 0` imposed on the nodes.
fn stream_from_velocity(grid: &Grid, state: &FlowState) -> Vec<Complex64> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let u1 = grid.rows_to_spectral(state.velocity.comp1.values());
    let u2 = grid.rows_to_spectral(state.velocity.comp2.values());
    let y = grid.y_coords();
    let mut psi = vec![zero(); nx * ny];
    let wall = grid.d1_stencil(0);
    for m in 0..independent_modes(nx) {
        let k = grid.wavenumber(m);
        if nx % 2 == 0 && m == nx / 2 {
            continue;
        }
        if m == 0 {
            for j in 1..ny {
                let inc = (u1[(j - 1) * nx] + u1[j * nx]) * (0.5 * (y[j] - y[j - 1]));
                psi[j * nx] = psi[(j - 1) * nx] + inc;
            }
        } else {
            for j in 0..ny {
                psi[j * nx + m] = Complex64::new(0.0, 1.0) * u2[j * nx + m] / k;
            }
            psi[(ny - 1) * nx + m] = zero();
        }
        psi[m] = zero();
        let [c0, c1, c2] = wall.coef;
        psi[2 * nx + m] = -(psi[m] * c0 + psi[nx + m] * c1) / c2;
    }
    symmetrize(grid, &mut psi);
    psi
}

/// `ω = −Δψ` on interior nodes, a second-order wall value from the
/// `ψ = ψ' = 0` fit `ψ ≈ a y² + b y³`, and `ω = 0` on the lid.
fn vorticity_from_stream(grid: &Grid, psi: &[Complex64]) -> Vec<Complex64> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let y = grid.y_coords();
    let mut omega = vec![zero(); nx * ny];
    for m in 0..nx {
        let k = grid.wavenumber(m);
        for j in 1..ny - 1 {
            let d2 = grid.d2_coef(j);
            let p = |jj: usize| psi[jj * nx + m];
            omega[j * nx + m] = -(p(j - 1) * d2[0] + p(j) * d2[1] + p(j + 1) * d2[2] - p(j) * (k * k));
        }
        let (y1, y2) = (y[1], y[2]);
        let (p1, p2) = (psi[nx + m], psi[2 * nx + m]);
        let a = (p1 * y2.powi(3) - p2 * y1.powi(3)) / (y1 * y1 * y2.powi(3) - y2 * y2 * y1.powi(3));
        omega[m] = -a * 2.0;
    }
    symmetrize(grid, &mut omega);
    omega
}

/// One self-starting NS step from `state`.
pub fn ns_step(state: &FlowState, dt: f64) -> Result<FlowState> {
    let mut solver = NsSolver::new(state)?;
    solver.step(dt)?;
    solver.state()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_channel_grid, Clustering, VectorField};
    use crate::solver::{ShearExact, ShearProfile, TopBoundary};
    use std::f64::consts::PI;

    fn shear_state(nu: f64, ny: usize) -> FlowState {
        let g = make_channel_grid(8, ny, 2.0 * PI, 4.0, Clustering::Tanh { strength: 2.0 }).unwrap();
        let p = ShearProfile::default();
        FlowState::new(0.0, nu, VectorField::from_fn(&g, |_, y| (p.value(y, 4.0), 0.0))).unwrap()
    }

    #[test]
    fn rest_state_stays_at_rest() {
        let g = make_channel_grid(16, 33, 2.0 * PI, 2.0, Clustering::Uniform).unwrap();
        let out = ns_step(&FlowState::rest(&g, 1e-2), 0.01).unwrap();
        assert!(out.velocity.comp1.values().iter().all(|&v| v == 0.0));
        assert!(out.velocity.comp2.values().iter().all(|&v| v == 0.0));
        assert_eq!(out.t, 0.01);
    }

    #[test]
    fn shear_step_tracks_heat_flow() {
        let nu = 1e-2;
        let st = shear_state(nu, 193);
        let dt = 0.01;
        let out = ns_step(&st, dt).unwrap();
        let g = out.grid().clone();
        for j in 0..g.ny() {
            let row = out.velocity.comp1.row(j);
            assert!(row.iter().all(|&v| v == row[0]));
            assert!(out.velocity.comp2.row(j).iter().all(|&v| v.abs() < 1e-14));
        }
        let exact = ShearExact::new(ShearProfile::default().function(4.0), nu, 4.0, TopBoundary::StressFree)
            .unwrap()
            .profile(dt, g.y_coords())
            .unwrap();
        let err = (0..g.ny())
            .map(|j| (out.velocity.comp1.at(0, j) - exact[j]).abs())
            .fold(0.0, f64::max);
        assert!(err < 5e-4, "{err}");
    }

    #[test]
    fn shear_converges_at_second_order() {
        let nu = 1e-2;
        let t_end: f64 = 0.5;
        let mut errs = vec![];
        for (ny, dt) in [(97, 0.01), (193, 0.005)] {
            let st = shear_state(nu, ny);
            let mut s = NsSolver::new(&st).unwrap();
            for _ in 0..(t_end / dt).round() as usize {
                s.step(dt).unwrap();
            }
            let out = s.state().unwrap();
            let g = out.grid();
            let exact = ShearExact::new(ShearProfile::default().function(4.0), nu, 4.0, TopBoundary::StressFree)
                .unwrap()
                .profile(t_end, g.y_coords())
                .unwrap();
            let e2: f64 = (0..ny)
                .map(|j| g.y_weights()[j] * (out.velocity.comp1.at(0, j) - exact[j]).powi(2))
                .sum();
            errs.push(e2.sqrt());
        }
        assert!((errs[0] / errs[1]).log2() > 1.8, "{errs:?}");
    }

    #[test]
    fn single_mode_decays_at_viscous_rate() {
        let (nu, k, amp) = (1e-3, 8.0, 0.1);
        let g = make_channel_grid(64, 193, 2.0 * PI, 2.0 * PI, Clustering::Uniform).unwrap();
        let win = |y: f64| (-((y - PI) / 2.0).powi(8)).exp();
        let dwin = |y: f64| -4.0 * ((y - PI) / 2.0).powi(7) * win(y);
        // ψ = a sin(kx) sin(ky) w(y)
        let u0 = VectorField::from_fn(&g, |x, y| {
            let u1 = amp * (k * x).sin() * (k * (k * y).cos() * win(y) + (k * y).sin() * dwin(y));
            let u2 = -amp * k * (k * x).cos() * (k * y).sin() * win(y);
            (u1, u2)
        });
        let mut s = NsSolver::new(&FlowState::new(0.0, nu, u0).unwrap()).unwrap();
        let e0 = s.state().unwrap().energy();
        for _ in 0..10 {
            s.step(0.01).unwrap();
        }
        let rate = -(s.state().unwrap().energy() / e0).ln() / 0.1;
        let analytic = 2.0 * nu * 2.0 * k * k;
        assert!((rate / analytic - 1.0).abs() < 0.05, "{rate} vs {analytic}");
    }

    #[test]
    fn rejects_bad_input() {
        let g = make_channel_grid(8, 17, 2.0 * PI, 2.0, Clustering::Uniform).unwrap();
        let slip = VectorField::from_fn(&g, |_, _| (1.0, 0.0));
        assert!(NsSolver::new(&FlowState::new(0.0, 1e-2, slip).unwrap()).is_err());
        assert!(NsSolver::new(&FlowState::rest(&g, 0.0)).is_err());
        let st = shear_state(1e-2, 33);
        match ns_step(&st, 10.0) {
            Err(Error::Cfl { dt, limit, .. }) => assert!(dt > limit),
            other => panic!("expected a CFL error, got {other:?}"),
        }
    }
}
