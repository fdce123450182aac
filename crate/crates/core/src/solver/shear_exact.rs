//! Exact heat-flow solution for shear data `(w(y, t), 0)` on `[0, Ly]`,
//! `w(0, t) = 0`, with a stress-free or no-slip lid at `y = Ly`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// Boundary condition at the top of the channel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopBoundary {
    /// `∂y w = 0` (stress-free lid, the solver default).
    #[default]
    StressFree,
    /// `w = 0`.
    NoSlip,
}

/// Largest series length before switching to the method of images.
const MAX_SERIES_TERMS: usize = 256;
/// Kernel tails beyond this many standard deviations are dropped.
const KERNEL_WIDTH: f64 = 12.0;

type ProfileFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Heat semigroup `e^{tν∂yy}` applied to a fixed initial profile.
#[derive(Clone)]
pub struct ShearExact {
    v0: Arc<ProfileFn>,
    nu: f64,
    height: f64,
    top: TopBoundary,
}

impl fmt::Debug for ShearExact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShearExact")
            .field("nu", &self.nu)
            .field("height", &self.height)
            .field("top", &self.top)
            .finish()
    }
}

impl ShearExact {
    pub fn new(
        v0: impl Fn(f64) -> f64 + Send + Sync + 'static,
        nu: f64,
        height: f64,
        top: TopBoundary,
    ) -> Result<Self> {
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(Error::invalid(format!("viscosity must be non-negative, got {nu}")));
        }
        if !(height > 0.0 && height.is_finite()) {
            return Err(Error::invalid(format!("channel height must be positive, got {height}")));
        }
        let w0 = v0(0.0);
        if w0 != 0.0 {
            return Err(Error::invalid(format!("shear profile must vanish at the wall, v0(0) = {w0}")));
        }
        Ok(ShearExact {
            v0: Arc::new(v0),
            nu,
            height,
            top,
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn height(&self) -> f64 {
        self.height
    }
    pub fn top(&self) -> TopBoundary {
        self.top
    }
    pub fn initial(&self, y: f64) -> f64 {
        (self.v0)(y)
    }

    fn eigenvalue(&self, n: usize) -> f64 {
        match self.top {
            TopBoundary::StressFree => (n as f64 + 0.5) * PI / self.height,
            TopBoundary::NoSlip => (n as f64 + 1.0) * PI / self.height,
        }
    }

    /// Number of sine modes with `e^{−νλ²t}` above double-precision round-off.
    fn series_terms(&self, t: f64) -> Option<usize> {
        let lambda_max = (40.0 / (self.nu * t)).sqrt();
        let n = (lambda_max * self.height / PI).ceil();
        (n <= MAX_SERIES_TERMS as f64).then_some(n as usize + 1)
    }

    /// Sine coefficients `b_n = (2/Ly) ∫ v0 sin(λ_n y) dy`.
    pub fn coefficients(&self, terms: usize) -> Vec<f64> {
        (0..terms)
            .map(|n| {
                let lam = self.eigenvalue(n);
                let pieces = n + 1;
                let h = self.height / pieces as f64;
                let integral: f64 = (0..pieces)
                    .map(|k| quad::integrate(|y| (self.v0)(y) * (lam * y).sin(), k as f64 * h, (k + 1) as f64 * h))
                    .sum();
                2.0 / self.height * integral
            })
            .collect()
    }

    /// `w(y, t)` and `∂y w(y, t)` at the given points.
    pub fn profile(&self, t: f64, ys: &[f64]) -> Result<Vec<f64>> {
        self.evaluate(t, ys, false)
    }

    pub fn gradient(&self, t: f64, ys: &[f64]) -> Result<Vec<f64>> {
        self.evaluate(t, ys, true)
    }

    fn evaluate(&self, t: f64, ys: &[f64], derivative: bool) -> Result<Vec<f64>> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::invalid(format!("time must be non-negative, got {t}")));
        }
        if let Some(&bad) = ys.iter().find(|&&y| !(0.0..=self.height).contains(&y)) {
            return Err(Error::invalid(format!("y = {bad} lies outside [0, {}]", self.height)));
        }
        if t == 0.0 || self.nu == 0.0 {
            return Ok(if derivative {
                ys.iter().map(|&y| self.initial_slope(y)).collect()
            } else {
                ys.iter().map(|&y| (self.v0)(y)).collect()
            });
        }
        match self.series_terms(t) {
            Some(n) => {
                let b = self.coefficients(n);
                Ok(ys.iter().map(|&y| self.series_at(&b, t, y, derivative)).collect())
            }
            None => Ok(ys.iter().map(|&y| self.images_at(t, y, derivative)).collect()),
        }
    }

    fn initial_slope(&self, y: f64) -> f64 {
        let h = 1e-5 * self.height;
        let (a, b) = ((y - h).max(0.0), (y + h).min(self.height));
        ((self.v0)(b) - (self.v0)(a)) / (b - a)
    }

    fn series_at(&self, b: &[f64], t: f64, y: f64, derivative: bool) -> f64 {
        b.iter()
            .enumerate()
            .rev()
            .map(|(n, &bn)| {
                let lam = self.eigenvalue(n);
                let decay = (-self.nu * lam * lam * t).exp();
                if derivative {
                    bn * decay * lam * (lam * y).cos()
                } else {
                    bn * decay * (lam * y).sin()
                }
            })
            .sum()
    }

    /// Reflections `(sign, orientation, shift)` mapping `z ∈ [0, Ly]` onto the
    /// extended initial data, and its period.
    fn images(&self) -> (&'static [(f64, f64, f64)], f64) {
        const STRESS_FREE: [(f64, f64, f64); 4] =
            [(1.0, 1.0, 0.0), (-1.0, -1.0, 0.0), (1.0, -1.0, 2.0), (-1.0, 1.0, -2.0)];
        const NO_SLIP: [(f64, f64, f64); 2] = [(1.0, 1.0, 0.0), (-1.0, -1.0, 0.0)];
        match self.top {
            TopBoundary::StressFree => (&STRESS_FREE, 4.0),
            TopBoundary::NoSlip => (&NO_SLIP, 2.0),
        }
    }

    fn images_at(&self, t: f64, y: f64, derivative: bool) -> f64 {
        let l = self.height;
        let var4 = 4.0 * self.nu * t;
        let sigma = (0.5 * var4).sqrt();
        let norm = 1.0 / (PI * var4).sqrt();
        let reach = KERNEL_WIDTH * sigma;
        let (maps, period) = self.images();
        let period = period * l;
        let m_max = ((reach + 3.0 * l) / period).ceil() as i64;
        let mut total = 0.0;
        for m in -m_max..=m_max {
            for &(sign, orient, shift) in maps {
                // image point p(z) = orient·z + shift·L + m·period
                let c = shift * l + m as f64 * period;
                let (zc, zlo, zhi) = {
                    let centre = orient * (y - c);
                    (centre, centre - reach, centre + reach)
                };
                let (a, b) = (zlo.max(0.0), zhi.min(l));
                if a >= b {
                    continue;
                }
                let kernel = |z: f64| {
                    let x = y - (orient * z + c);
                    let k = norm * (-x * x / var4).exp();
                    let k = if derivative { -2.0 * x / var4 * k } else { k };
                    (self.v0)(z) * k
                };
                let mut breaks = vec![];
                for p in [zc - 3.0 * sigma, zc, zc + 3.0 * sigma] {
                    if p > a && p < b {
                        breaks.push(p);
                    }
                }
                total += sign * quad::integrate_split(kernel, a, b, &breaks);
            }
        }
        total
    }
}

/// `e^{tν∂yy} v0` sampled at `ys`, with a stress-free lid at `y = height`.
pub fn shear_exact(
    v0: impl Fn(f64) -> f64 + Send + Sync + 'static,
    nu: f64,
    t: f64,
    ys: &[f64],
    height: f64,
) -> Result<Vec<f64>> {
    ShearExact::new(v0, nu, height, TopBoundary::StressFree)?.profile(t, ys)
}
