//! Named initial data. Every preset vanishes on the wall, so the same field
//! is admissible for both the no-slip and the slip problem.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Grid, VectorField};

/// Wall-normal shear profile `v(y)` with `v(0) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ShearProfile {
    /// `v = −a (1 − e^{−y/ℓ})`; the default `a = ℓ = 1` gives `−(1 − e^{−y})`.
    Exponential { amplitude: f64, scale: f64 },
    /// `v = sin((n + ½) π y / Ly)`, a decaying eigenmode of the stress-free channel.
    Eigenmode { mode: usize },
}

impl Default for ShearProfile {
    fn default() -> Self {
        ShearProfile::Exponential {
            amplitude: 1.0,
            scale: 1.0,
        }
    }
}

impl ShearProfile {
    pub fn value(&self, y: f64, height: f64) -> f64 {
        match *self {
            ShearProfile::Exponential { amplitude, scale } => -amplitude * (-(-y / scale).exp_m1()),
            ShearProfile::Eigenmode { mode } => ((mode as f64 + 0.5) * PI * y / height).sin(),
        }
    }

    pub fn function(self, height: f64) -> impl Fn(f64) -> f64 + Send + Sync + Clone + 'static {
        move |y| self.value(y, height)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ShearProfile::Exponential { amplitude, scale } => {
                if !(amplitude.is_finite() && scale > 0.0 && scale.is_finite()) {
                    return Err(Error::invalid("exponential shear needs finite amplitude and positive scale"));
                }
            }
            ShearProfile::Eigenmode { .. } => {}
        }
        Ok(())
    }
}

/// Initial-data descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialData {
    Zero,
    Shear {
        #[serde(default)]
        profile: ShearProfile,
    },
    /// Shear plus a seeded sum of wall-attached cellular modes.
    PerturbedShear {
        #[serde(default)]
        profile: ShearProfile,
        amplitude: f64,
        modes: usize,
    },
    /// Gaussian vortex windowed so that `ψ = ∂y ψ = 0` on the wall.
    Vortex {
        x0: f64,
        y0: f64,
        radius: f64,
        strength: f64,
    },
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData::Shear {
            profile: ShearProfile::default(),
        }
    }
}

/// Width of the wall window used by the perturbation and vortex presets.
const WALL_WINDOW: f64 = 0.3;
/// Decay length of the perturbation stream function.
const PERTURBATION_DEPTH: f64 = 0.25;

impl InitialData {
    pub fn name(&self) -> &'static str {
        match self {
            InitialData::Zero => "zero",
            InitialData::Shear { .. } => "shear",
            InitialData::PerturbedShear { .. } => "perturbed-shear",
            InitialData::Vortex { .. } => "vortex",
        }
    }

    /// The shear part of the data, if the preset has one.
    pub fn shear_profile(&self) -> Option<ShearProfile> {
        match *self {
            InitialData::Shear { profile } | InitialData::PerturbedShear { profile, .. } => Some(profile),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            InitialData::Zero => Ok(()),
            InitialData::Shear { profile } => profile.validate(),
            InitialData::PerturbedShear {
                profile,
                amplitude,
                modes,
            } => {
                profile.validate()?;
                if !amplitude.is_finite() || modes == 0 {
                    return Err(Error::invalid("perturbed shear needs a finite amplitude and at least one mode"));
                }
                Ok(())
            }
            InitialData::Vortex {
                y0,
                radius,
                strength,
                x0,
            } => {
                if !(radius > 0.0 && y0 > 0.0 && strength.is_finite() && x0.is_finite()) {
                    return Err(Error::invalid("vortex needs positive radius and height"));
                }
                Ok(())
            }
        }
    }

    /// Samples the velocity on `grid`; the seed drives the random perturbation.
    pub fn velocity(&self, grid: &Arc<Grid>, seed: u64) -> Result<VectorField> {
        self.validate()?;
        let height = grid.height();
        let field = match *self {
            InitialData::Zero => VectorField::zeros(grid),
            InitialData::Shear { profile } => VectorField::from_fn(grid, |_, y| (profile.value(y, height), 0.0)),
            InitialData::PerturbedShear {
                profile,
                amplitude,
                modes,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let k0 = 2.0 * PI / grid.period();
                let terms: Vec<(f64, f64, f64)> = (1..=modes)
                    .map(|m| {
                        let c = amplitude * rng.random_range(0.5..1.0) / m as f64;
                        let theta = rng.random_range(0.0..2.0 * PI);
                        (m as f64 * k0, c, theta)
                    })
                    .collect();
                let l = PERTURBATION_DEPTH;
                VectorField::from_fn(grid, |x, y| {
                    // ψ = Σ c cos(kx + θ) · (y/ℓ)² e^{−y/ℓ}
                    let e = (-y / l).exp();
                    let b = (y / l).powi(2) * e;
                    let db = (2.0 * y / (l * l) - y * y / l.powi(3)) * e;
                    let (mut u1, mut u2) = (profile.value(y, height), 0.0);
                    for &(k, c, th) in &terms {
                        u1 += c * (k * x + th).cos() * db;
                        u2 += c * k * (k * x + th).sin() * b;
                    }
                    (u1, u2)
                })
            }
            InitialData::Vortex {
                x0,
                y0,
                radius,
                strength,
            } => {
                let lx = grid.period();
                let r2 = radius * radius;
                VectorField::from_fn(grid, |x, y| {
                    let phase = PI * (x - x0) / lx;
                    let xs = lx / PI * phase.sin();
                    let dxs = phase.cos();
                    let q = (y / WALL_WINDOW).powi(2);
                    let eq = (-q).exp();
                    let w = (1.0 - eq).powi(2);
                    let dw = 2.0 * (1.0 - eq) * eq * 2.0 * y / (WALL_WINDOW * WALL_WINDOW);
                    let g = strength * (-(xs * xs + (y - y0).powi(2)) / r2).exp();
                    let dpsi_dx = g * w * (-2.0 * xs * dxs / r2);
                    let dpsi_dy = g * (w * (-2.0 * (y - y0) / r2) + dw);
                    (dpsi_dy, -dpsi_dx)
                })
            }
        };
        if !field.is_finite() {
            return Err(Error::invalid("initial data produced non-finite values"));
        }
        Ok(field)
    }
}
