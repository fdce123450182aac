use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::criteria::{LayerSpec, MSchedule};
use crate::error::{Error, Result};
use crate::field::GridSpec;
use crate::solver::{InitialData, SimulationConfig};

/// What produces the viscous trajectory of each sweep point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// Paired Navier–Stokes and Euler simulations.
    #[default]
    Solver,
    /// Exact heat flow of a shear profile against the steady Euler shear.
    ShearExact,
}

/// A viscosity sweep, read from TOML.
///
/// ```toml
/// nu_list = [1e-2, 1e-3, 1e-4]
/// T = 1.0
/// dt = 1e-3
/// outputs = 10
/// seed = 7
///
/// [grid]
/// nx = 64
/// ny = 129
/// period = 6.283185307179586
/// height = 4.0
/// clustering = { kind = "tanh", strength = 2.0 }
///
/// [initial]
/// kind = "shear"
///
/// [M]
/// form = "power"
/// c = 1.0
/// a = 0.5
///
/// [layer]
/// C = 10.0
/// r = "inf"
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub nu_list: Vec<f64>,
    pub grid: GridSpec,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub dt: f64,
    pub outputs: usize,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(rename = "M", default)]
    pub m_schedule: MSchedule,
    #[serde(default)]
    pub layer: LayerSpec,
    /// Further layer constants whose criterion reports are emitted alongside.
    #[serde(default)]
    pub c_grid: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub use_du1dy: bool,
    /// Frozen bound constant; calibrated from the sweep itself when absent.
    #[serde(default)]
    pub c_fit: Option<f64>,
    /// Corrector thickness `α`; defaults to `ν / C` per point.
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub engine: Engine,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            nu_list: vec![1e-2, 1e-3],
            grid: GridSpec::default(),
            t_end: 1.0,
            dt: 1e-3,
            outputs: 10,
            initial: InitialData::default(),
            m_schedule: MSchedule::default(),
            layer: LayerSpec::default(),
            c_grid: Vec::new(),
            seed: 0,
            use_du1dy: false,
            c_fit: None,
            alpha: None,
            engine: Engine::Solver,
        }
    }
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read config {}: {e}", path.display())))?;
        SweepConfig::from_toml_str(&text).map_err(|e| match e {
            Error::InvalidArgument(m) => Error::InvalidArgument(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("sweep config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.nu_list.is_empty() {
            return Err(Error::invalid("nu_list must not be empty"));
        }
        if self.nu_list.iter().any(|&nu| !(nu > 0.0 && nu.is_finite())) {
            return Err(Error::invalid("nu_list entries must be positive"));
        }
        if self.nu_list.windows(2).any(|w| !(w[0] > w[1])) {
            return Err(Error::invalid("nu_list must be sorted in strictly descending order"));
        }
        if self.c_grid.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
            return Err(Error::invalid("c_grid entries must be positive"));
        }
        if let Some(c) = self.c_fit {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::invalid(format!("c_fit must be positive, got {c}")));
            }
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::invalid(format!("alpha must lie in (0, 1], got {a}")));
            }
        }
        if self.engine == Engine::ShearExact && !matches!(self.initial, InitialData::Shear { .. }) {
            return Err(Error::invalid("the shear-exact engine needs shear initial data"));
        }
        crate::field::Grid::new(self.grid)?;
        self.m_schedule.validate()?;
        self.layer.validate()?;
        self.simulation(self.nu_list[0]).validate()
    }

    /// Paired-run configuration for one viscosity.
    pub fn simulation(&self, nu: f64) -> SimulationConfig {
        SimulationConfig {
            grid: self.grid,
            nu,
            t_end: self.t_end,
            dt: self.dt,
            outputs: self.outputs,
            initial: self.initial,
            seed: self.seed,
        }
    }

    pub fn output_times(&self) -> Vec<f64> {
        self.simulation(self.nu_list[0]).output_times()
    }

    /// Corrector thickness used for the energy budget at viscosity `nu`.
    pub fn alpha_for(&self, nu: f64) -> f64 {
        self.alpha.unwrap_or((nu / self.layer.c).min(1.0))
    }

    /// The layer constants reported besides `layer.C`.
    pub fn extra_layers(&self) -> Vec<LayerSpec> {
        self.c_grid
            .iter()
            .filter(|&&c| c != self.layer.c)
            .map(|&c| LayerSpec { c, r: self.layer.r })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doc_example_parses() {
        let text = r#"
nu_list = [1e-2, 1e-3, 1e-4]
T = 1.0
dt = 1e-3
outputs = 10
seed = 7

[grid]
nx = 64
ny = 129
period = 6.283185307179586
height = 4.0
clustering = { kind = "tanh", strength = 2.0 }

[initial]
kind = "shear"

[M]
form = "power"
c = 1.0
a = 0.5

[layer]
C = 10.0
r = "inf"
"#;
        let cfg = SweepConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.nu_list.len(), 3);
        assert!(cfg.layer.r.value().is_infinite());
        let again = SweepConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(again, cfg);
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<SweepConfig>(&json).unwrap(), cfg);
    }

    #[test]
    fn validation() {
        let ok = SweepConfig::default();
        assert!(ok.validate().is_ok());
        let unsorted = SweepConfig {
            nu_list: vec![1e-3, 1e-2],
            ..ok.clone()
        };
        assert!(unsorted.validate().is_err());
        let bad_t = SweepConfig { t_end: 0.0, ..ok.clone() };
        assert!(bad_t.validate().is_err());
        let negative = SweepConfig {
            nu_list: vec![-1.0],
            ..ok.clone()
        };
        assert!(negative.validate().is_err());
        assert!(SweepConfig::from_toml_str("nu_list = [1e-2]\nbogus = 1").is_err());
    }
}
