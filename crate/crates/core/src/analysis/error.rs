use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{FlowState, Trajectory};

/// `‖u(t) − ū(t)‖²_{L²}` at the output times and its supremum.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub sup_value: f64,
}

impl ErrorSeries {
    pub fn from_samples(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Mismatch("error series times and values differ in length".into()));
        }
        if values.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::invalid("error series values must be non-negative"));
        }
        let sup_value = values.iter().copied().fold(0.0, f64::max);
        Ok(ErrorSeries {
            times,
            values,
            sup_value,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,error_sq\n");
        for (t, v) in self.times.iter().zip(&self.values) {
            out.push_str(&format!("{t},{v}\n"));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Squared `L²` distance between two states on the same grid.
pub fn state_distance_sq(a: &FlowState, b: &FlowState) -> Result<f64> {
    if a.grid().spec() != b.grid().spec() {
        return Err(Error::Mismatch("states live on different grids".into()));
    }
    Ok(a.velocity.sub(&b.velocity).energy())
}

pub fn error_series(ns: &Trajectory, euler: &Trajectory) -> Result<ErrorSeries> {
    ns.check_paired(euler)?;
    let values = ns
        .states()
        .iter()
        .zip(euler.states())
        .map(|(u, ub)| state_distance_sq(u, ub))
        .collect::<Result<Vec<_>>>()?;
    ErrorSeries::from_samples(ns.times(), values)
}
