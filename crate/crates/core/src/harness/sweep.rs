use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{mpsc, Arc};
use std::thread;

use super::config::{Engine, SweepConfig};
use crate::analysis::{calibrate_c_fit, error_series, fit_rate, shear_reference, theorem_bounds, ErrorSeries, RateFit};
use crate::criteria::{evaluate_criteria, CriterionReport, LayerSpec};
use crate::error::{Error, Result};
use crate::field::Grid;
use crate::solver::{run_simulation, InitialData, ShearExact, TopBoundary, Trajectory};

/// Everything measured at one viscosity.
#[derive(Clone, Debug, PartialEq)]
pub struct PointResult {
    pub errors: ErrorSeries,
    pub criteria: CriterionReport,
    /// Reports for the further layer constants of the configuration.
    pub extra_criteria: Vec<(LayerSpec, CriterionReport)>,
}

impl PointResult {
    pub fn criteria_pass(&self) -> bool {
        self.criteria.all_pass()
    }

    pub fn under_resolved(&self) -> bool {
        self.criteria.any_under_resolved()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub nu: f64,
    /// The failure message when the point could not be computed.
    pub outcome: std::result::Result<PointResult, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub config: SweepConfig,
    /// One entry per `nu_list` value, in the same (descending) order.
    pub points: Vec<SweepPoint>,
    pub c_fit: Option<f64>,
    pub c_fit_calibrated: bool,
    /// Fit of `sup error` against `ν`; absent with fewer than three usable points.
    pub rate: Option<RateFit>,
}

impl SweepResult {
    /// `(thm1, thm2)` at the final time for a point of the sweep.
    pub fn bounds(&self, nu: f64) -> Option<(f64, f64)> {
        self.c_fit
            .map(|c| theorem_bounds(nu, self.config.t_end, &self.config.m_schedule, c))
    }

    /// Sup error at or below `thm2` at every output time.
    pub fn within_bound(&self, point: &SweepPoint) -> Option<bool> {
        let c = self.c_fit?;
        let res = point.outcome.as_ref().ok()?;
        Some(res.errors.times.iter().zip(&res.errors.values).all(|(&t, &e)| {
            let (_, thm2) = theorem_bounds(point.nu, t, &self.config.m_schedule, c);
            e <= thm2 * (1.0 + 1e-12)
        }))
    }

    pub fn failures(&self) -> impl Iterator<Item = (f64, &str)> {
        self.points
            .iter()
            .filter_map(|p| p.outcome.as_ref().err().map(|m| (p.nu, m.as_str())))
    }
}

fn trajectories(config: &SweepConfig, nu: f64) -> Result<(Trajectory, Trajectory)> {
    match config.engine {
        Engine::Solver => {
            let run = run_simulation(&config.simulation(nu))?;
            Ok((run.ns, run.euler))
        }
        Engine::ShearExact => {
            let InitialData::Shear { profile } = config.initial else {
                return Err(Error::invalid("the shear-exact engine needs shear initial data"));
            };
            let height = config.grid.height;
            let v0 = profile.function(height);
            let exact = ShearExact::new(v0, nu, height, TopBoundary::StressFree)?;
            let grid = Arc::new(Grid::new(config.grid)?);
            shear_reference(&exact, &grid, &config.output_times())
        }
    }
}

/// Computes one sweep point.
pub fn run_point(config: &SweepConfig, nu: f64) -> Result<PointResult> {
    let (ns, euler) = trajectories(config, nu)?;
    let errors = error_series(&ns, &euler)?;
    let m = &config.m_schedule;
    let criteria = evaluate_criteria(&ns, &euler, m, &config.layer, config.use_du1dy)?;
    let extra_criteria = config
        .extra_layers()
        .into_iter()
        .map(|spec| Ok((spec, evaluate_criteria(&ns, &euler, m, &spec, config.use_du1dy)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PointResult {
        errors,
        criteria,
        extra_criteria,
    })
}

/// Worker count from `--jobs`, then `ILIM_JOBS`, then the available cores.
pub fn resolve_jobs(flag: Option<usize>) -> usize {
    flag.or_else(|| std::env::var("ILIM_JOBS").ok().and_then(|v| v.trim().parse().ok()))
        .or_else(|| thread::available_parallelism().ok().map(|n| n.get()))
        .unwrap_or(1)
        .max(1)
}

pub fn run_sweep(config: &SweepConfig, jobs: usize) -> Result<SweepResult> {
    run_sweep_with(config, jobs, run_point)
}

/// Runs `point` for every viscosity on a pool of `jobs` threads. Errors and
/// panics are recorded per point; the sweep fails only if every point does.
pub fn run_sweep_with<F>(config: &SweepConfig, jobs: usize, point: F) -> Result<SweepResult>
where
    F: Fn(&SweepConfig, f64) -> Result<PointResult> + Sync,
{
    config.validate()?;
    let nus = &config.nu_list;
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, std::result::Result<PointResult, String>)>();
    thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, nus.len()) {
            let tx = tx.clone();
            let (next, point) = (&next, &point);
            scope.spawn(move || loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= nus.len() {
                    break;
                }
                let out = match catch_unwind(AssertUnwindSafe(|| point(config, nus[k]))) {
                    Ok(Ok(res)) => Ok(res),
                    Ok(Err(e)) => Err(e.to_string()),
                    Err(panic) => Err(panic
                        .downcast_ref::<String>()
                        .cloned()
                        .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_else(|| "worker panicked".into())),
                };
                if tx.send((k, out)).is_err() {
                    break;
                }
            });
        }
    });
    drop(tx);
    let mut slots: Vec<Option<std::result::Result<PointResult, String>>> = vec![None; nus.len()];
    for (k, out) in rx {
        slots[k] = Some(out);
    }
    let points: Vec<SweepPoint> = nus
        .iter()
        .zip(slots)
        .map(|(&nu, out)| SweepPoint {
            nu,
            outcome: out.unwrap_or_else(|| Err("point was not computed".into())),
        })
        .collect();
    if points.iter().all(|p| p.outcome.is_err()) {
        return Err(Error::SweepFailed);
    }

    let good: Vec<(f64, &ErrorSeries)> = points
        .iter()
        .filter_map(|p| p.outcome.as_ref().ok().map(|r| (p.nu, &r.errors)))
        .collect();
    let (c_fit, c_fit_calibrated) = match config.c_fit {
        Some(c) => (Some(c), false),
        None => (calibrate_c_fit(&good, &config.m_schedule).ok().filter(|&c| c > 0.0), true),
    };
    let samples: Vec<(f64, f64)> = good
        .iter()
        .filter(|(_, e)| e.sup_value > 0.0)
        .map(|(nu, e)| (*nu, e.sup_value))
        .collect();
    let rate = fit_rate(&samples).ok();
    Ok(SweepResult {
        config: config.clone(),
        points,
        c_fit,
        c_fit_calibrated,
        rate,
    })
}
