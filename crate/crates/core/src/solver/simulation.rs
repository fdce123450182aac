use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::euler::EulerSolver;
use super::ns::NsSolver;
use super::presets::InitialData;
use super::state::FlowState;
use super::trajectory::{StepRecord, Trajectory};
use crate::error::{Error, Result};
use crate::field::{Clustering, Grid, GridSpec};

pub const NS_SCHEME: &str = "vorticity-streamfunction AB2/CN, half-step predictor start";
pub const EULER_SCHEME: &str = "vorticity transport RK4";

/// One paired Navier–Stokes / Euler run from identical initial data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub grid: GridSpec,
    pub nu: f64,
    /// Final time `T`.
    pub t_end: f64,
    /// Largest admissible step; the actual step divides the output spacing.
    pub dt: f64,
    /// Number of equally spaced output times after `t = 0`.
    pub outputs: usize,
    pub initial: InitialData,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            grid: GridSpec {
                nx: 128,
                ny: 193,
                period: 2.0 * std::f64::consts::PI,
                height: 4.0,
                clustering: Clustering::Tanh { strength: 2.0 },
            },
            nu: 1e-3,
            t_end: 1.0,
            dt: 1e-3,
            outputs: 10,
            initial: InitialData::default(),
            seed: 0,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::invalid(format!("nu must be positive, got {}", self.nu)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::invalid(format!("T must be positive, got {}", self.t_end)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if self.outputs == 0 {
            return Err(Error::invalid("at least one output time is required"));
        }
        self.initial.validate()
    }

    /// Output times `k T / outputs`, `k = 0..=outputs`.
    pub fn output_times(&self) -> Vec<f64> {
        (0..=self.outputs)
            .map(|k| self.t_end * k as f64 / self.outputs as f64)
            .collect()
    }

    /// `(steps per output, step size)`.
    pub fn stepping(&self) -> (usize, f64) {
        let spacing = self.t_end / self.outputs as f64;
        let n = ((spacing / self.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        (n, spacing / n as f64)
    }
}

/// NS and Euler trajectories sampled at the same times on the same grid.
#[derive(Clone, Debug)]
pub struct PairedRun {
    pub ns: Trajectory,
    pub euler: Trajectory,
}

trait Stepper {
    fn advance(&mut self, dt: f64) -> Result<()>;
    fn snapshot(&self) -> Result<FlowState>;
    fn vorticity_max(&self) -> f64;
}

impl Stepper for NsSolver {
    fn advance(&mut self, dt: f64) -> Result<()> {
        self.step(dt)
    }
    fn snapshot(&self) -> Result<FlowState> {
        self.state()
    }
    fn vorticity_max(&self) -> f64 {
        self.max_vorticity()
    }
}

impl Stepper for EulerSolver {
    fn advance(&mut self, dt: f64) -> Result<()> {
        self.step(dt)
    }
    fn snapshot(&self) -> Result<FlowState> {
        self.state()
    }
    fn vorticity_max(&self) -> f64 {
        self.max_vorticity()
    }
}

fn integrate(
    solver: &mut dyn Stepper,
    traj: &mut Trajectory,
    times: &[f64],
    steps_per_output: usize,
    dt: f64,
) -> Result<()> {
    let record = |s: &dyn Stepper, st: &FlowState| StepRecord {
        t: st.t,
        energy: st.energy(),
        max_vorticity: s.vorticity_max(),
    };
    let first = solver.snapshot()?;
    traj.steps.push(record(solver, &first));
    traj.push(first)?;
    for &target in &times[1..] {
        for _ in 0..steps_per_output {
            solver.advance(dt)?;
            let st = solver.snapshot()?;
            traj.steps.push(record(solver, &st));
        }
        let mut st = solver.snapshot()?;
        st.t = target;
        traj.push(st)?;
    }
    Ok(())
}

/// Builds the grid and initial velocity for `config`.
pub fn initial_state(config: &SimulationConfig) -> Result<(Arc<Grid>, FlowState)> {
    config.validate()?;
    let grid = Arc::new(Grid::new(config.grid)?);
    let vel = config.initial.velocity(&grid, config.seed)?;
    let state = FlowState::new(0.0, config.nu, vel)?;
    Ok((grid, state))
}

/// Runs Navier–Stokes and Euler from the same initial data.
pub fn run_simulation(config: &SimulationConfig) -> Result<PairedRun> {
    let (grid, u0) = initial_state(config)?;
    let times = config.output_times();
    let (per_output, dt) = config.stepping();

    let mut ns_solver = NsSolver::new(&u0)?;
    let mut ns = Trajectory::new(&grid, NS_SCHEME, dt, config.nu);
    integrate(&mut ns_solver, &mut ns, &times, per_output, dt)?;

    let mut inviscid = u0.clone();
    inviscid.nu = 0.0;
    let mut euler_solver = EulerSolver::new(&inviscid)?;
    let mut euler = Trajectory::new(&grid, EULER_SCHEME, dt, 0.0);
    integrate(&mut euler_solver, &mut euler, &times, per_output, dt)?;

    Ok(PairedRun { ns, euler })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::ShearProfile;
    use std::f64::consts::PI;

    fn small(initial: InitialData) -> SimulationConfig {
        SimulationConfig {
            grid: GridSpec {
                nx: 16,
                ny: 65,
                period: 2.0 * PI,
                height: 4.0,
                clustering: Clustering::Tanh { strength: 2.0 },
            },
            nu: 1e-3,
            t_end: 1.0,
            dt: 2e-3,
            outputs: 5,
            initial,
            seed: 3,
        }
    }

    #[test]
    fn stepping_divides_output_spacing() {
        let mut c = small(InitialData::Zero);
        c.dt = 0.03;
        let (n, dt) = c.stepping();
        assert_eq!(n, 7);
        assert!((dt * 7.0 - 0.2).abs() < 1e-15);
        assert_eq!(c.output_times().len(), 6);
    }

    #[test]
    fn zero_data_stays_zero() {
        let run = run_simulation(&small(InitialData::Zero)).unwrap();
        run.ns.check_paired(&run.euler).unwrap();
        for s in run.ns.states().iter().chain(run.euler.states()) {
            assert!(s.velocity.comp1.values().iter().all(|&v| v == 0.0));
            assert!(s.velocity.comp2.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn shear_stays_streamwise_invariant() {
        let run = run_simulation(&small(InitialData::default())).unwrap();
        for s in run.ns.states() {
            for j in 0..65 {
                let row = s.velocity.comp1.row(j);
                assert!(row.iter().all(|&v| (v - row[0]).abs() < 1e-14));
            }
        }
        assert_eq!(run.ns.times(), vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0]);
    }

    #[test]
    fn perturbed_shear_energy_decreases() {
        let run = run_simulation(&small(InitialData::PerturbedShear {
            profile: ShearProfile::default(),
            amplitude: 0.1,
            modes: 3,
        }))
        .unwrap();
        for w in run.ns.steps.windows(2) {
            assert!(w[1].energy <= w[0].energy);
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut c = small(InitialData::Zero);
        c.nu = 0.0;
        assert!(run_simulation(&c).is_err());
        let mut c = small(InitialData::Zero);
        c.outputs = 0;
        assert!(c.validate().is_err());
    }
}
