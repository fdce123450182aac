use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::state::FlowState;
use crate::error::{Error, Result};
use crate::field::{Clustering, Grid, GridSpec, Snapshot};

/// Per-step diagnostics recorded while integrating.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    pub energy: f64,
    pub max_vorticity: f64,
}

/// Snapshots at the output times of one run on a shared grid.
#[derive(Clone, Debug)]
pub struct Trajectory {
    grid: Arc<Grid>,
    pub scheme: String,
    pub dt: f64,
    pub nu: f64,
    states: Vec<FlowState>,
    pub steps: Vec<StepRecord>,
}

/// JSON manifest stored next to the snapshot files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub scheme: String,
    pub dt: f64,
    pub nu: f64,
    pub cfl: f64,
    pub grid: GridSpec,
    pub times: Vec<f64>,
    pub files: Vec<String>,
}

impl Trajectory {
    pub fn new(grid: &Arc<Grid>, scheme: impl Into<String>, dt: f64, nu: f64) -> Self {
        Trajectory {
            grid: grid.clone(),
            scheme: scheme.into(),
            dt,
            nu,
            states: Vec::new(),
            steps: Vec::new(),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn states(&self) -> &[FlowState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    /// Appends a snapshot; times must increase strictly and the grid must match.
    pub fn push(&mut self, state: FlowState) -> Result<()> {
        if !Arc::ptr_eq(state.grid(), &self.grid) && state.grid().spec() != self.grid.spec() {
            return Err(Error::Mismatch("snapshot grid differs from the trajectory grid".into()));
        }
        if let Some(last) = self.states.last() {
            if !(state.t > last.t) {
                return Err(Error::invalid(format!(
                    "snapshot times must increase: {} after {}",
                    state.t, last.t
                )));
            }
        }
        self.states.push(state);
        Ok(())
    }

    /// Checks that two trajectories share grid and output times.
    pub fn check_paired(&self, other: &Trajectory) -> Result<()> {
        if self.grid.spec() != other.grid.spec() {
            return Err(Error::Mismatch("trajectories live on different grids".into()));
        }
        if self.len() != other.len() {
            return Err(Error::Mismatch(format!(
                "trajectories have {} and {} snapshots",
                self.len(),
                other.len()
            )));
        }
        for (a, b) in self.states.iter().zip(&other.states) {
            if (a.t - b.t).abs() > 1e-12 * (1.0 + a.t.abs()) {
                return Err(Error::Mismatch(format!("output times differ: {} vs {}", a.t, b.t)));
            }
        }
        Ok(())
    }

    pub fn manifest(&self) -> TrajectoryManifest {
        TrajectoryManifest {
            scheme: self.scheme.clone(),
            dt: self.dt,
            nu: self.nu,
            cfl: super::spectral::CFL_NUMBER,
            grid: self.grid.spec(),
            times: self.times(),
            files: (0..self.len()).map(snapshot_name).collect(),
        }
    }

    /// Writes `snap_NNNNN.ilim` files and `manifest.json` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (k, s) in self.states.iter().enumerate() {
            Snapshot::from_velocity(&s.velocity, s.t, s.nu).write(&dir.join(snapshot_name(k)))?;
        }
        let path = dir.join("manifest.json");
        let json = serde_json::to_string_pretty(&self.manifest()).map_err(|e| Error::Format(e.to_string()))?;
        fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))
    }

    /// Reads a directory written by [`Trajectory::write_dir`]. Without a manifest,
    /// every `*.ilim` file is loaded in name order.
    pub fn read_dir(dir: &Path) -> Result<Self> {
        let manifest_path = dir.join("manifest.json");
        let (files, scheme, dt, spec) = if manifest_path.exists() {
            let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
            let m: TrajectoryManifest =
                serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", manifest_path.display())))?;
            (m.files, m.scheme, m.dt, Some(m.grid))
        } else {
            let mut names: Vec<String> = fs::read_dir(dir)
                .map_err(|e| Error::io(dir, e))?
                .filter_map(|e| e.ok())
                .map(|e| e.file_name().to_string_lossy().into_owned())
                .filter(|n| n.ends_with(".ilim"))
                .collect();
            names.sort();
            (names, "unknown".to_string(), 0.0, None)
        };
        if files.is_empty() {
            return Err(Error::invalid(format!("{} holds no snapshots", dir.display())));
        }
        let first = Snapshot::read(&dir.join(&files[0]))?;
        // ILIM1 headers carry no clustering; bare directories are read as uniform grids
        let spec = spec.unwrap_or(GridSpec {
            nx: first.nx as usize,
            ny: first.ny as usize,
            period: first.lx,
            height: first.ly,
            clustering: Clustering::Uniform,
        });
        let grid = Arc::new(Grid::new(spec)?);
        let mut traj = Trajectory::new(&grid, scheme, dt, first.nu);
        for name in &files {
            let snap = Snapshot::read(&dir.join(name))?;
            let vel = snap.to_velocity(&grid)?;
            traj.push(FlowState::new(snap.t, snap.nu, vel)?)?;
        }
        Ok(traj)
    }
}

fn snapshot_name(k: usize) -> String {
    format!("snap_{k:05}.ilim")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_channel_grid, Clustering, VectorField};
    use std::f64::consts::PI;

    #[test]
    fn directory_round_trip() {
        let g = make_channel_grid(8, 9, 2.0 * PI, 1.0, Clustering::Tanh { strength: 1.5 }).unwrap();
        let mut tr = Trajectory::new(&g, "test", 0.1, 1e-3);
        for k in 0..3 {
            let v = VectorField::from_fn(&g, |x, y| (y * (x + k as f64).sin(), 0.0));
            tr.push(FlowState::new(k as f64 * 0.5, 1e-3, v).unwrap()).unwrap();
        }
        let dir = tempfile::tempdir().unwrap();
        tr.write_dir(dir.path()).unwrap();
        let back = Trajectory::read_dir(dir.path()).unwrap();
        assert_eq!(back.grid().spec(), g.spec());
        assert_eq!(back.times(), tr.times());
        assert_eq!(back.scheme, "test");
        for (a, b) in back.states().iter().zip(tr.states()) {
            assert_eq!(a.velocity.comp1.values(), b.velocity.comp1.values());
        }
    }

    #[test]
    fn times_must_increase() {
        let g = make_channel_grid(8, 9, 2.0 * PI, 1.0, Clustering::Uniform).unwrap();
        let mut tr = Trajectory::new(&g, "test", 0.1, 0.0);
        tr.push(FlowState::rest(&g, 0.0)).unwrap();
        assert!(tr.push(FlowState::rest(&g, 0.0)).is_err());
    }
}
