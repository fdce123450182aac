use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wall-normal node distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Clustering {
    Uniform,
    /// `y = Ly (1 - tanh(s (1 - η)) / tanh(s))`, which packs nodes against `y = 0`.
    Tanh { strength: f64 },
}

/// Everything needed to rebuild a [`Grid`]; this is what gets persisted.
/// Missing keys take the defaults: 64 x 129 nodes, period 2π, height 4, tanh strength 2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub period: f64,
    pub height: f64,
    pub clustering: Clustering,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            nx: 64,
            ny: 129,
            period: 2.0 * std::f64::consts::PI,
            height: 4.0,
            clustering: Clustering::Tanh { strength: 2.0 },
        }
    }
}

/// Three-point finite-difference stencil acting on rows `start..start + 3`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Stencil {
    pub start: usize,
    pub coef: [f64; 3],
}

impl Stencil {
    #[inline]
    pub fn apply(&self, col: impl Fn(usize) -> f64) -> f64 {
        self.coef[0] * col(self.start) + self.coef[1] * col(self.start + 1) + self.coef[2] * col(self.start + 2)
    }
}

/// Periodic channel `[0, Lx) x [0, Ly]` with the wall at `y = 0`.
///
/// Storage for fields on this grid is row-major in `y`: node `(i, j)` lives at
/// `j * nx + i`, so each wall-parallel row is contiguous.
pub struct Grid {
    spec: GridSpec,
    y: Vec<f64>,
    wy: Vec<f64>,
    dx: f64,
    d1: Vec<Stencil>,
    d2: Vec<[f64; 3]>,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("spec", &self.spec).finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.y == other.y
    }
}

/// Builds a channel grid. `nx` must be even (spectral derivatives in `x`).
pub fn make_channel_grid(
    nx: usize,
    ny: usize,
    period: f64,
    height: f64,
    clustering: Clustering,
) -> Result<Arc<Grid>> {
    Grid::new(GridSpec {
        nx,
        ny,
        period,
        height,
        clustering,
    })
    .map(Arc::new)
}

impl Grid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        let GridSpec {
            nx,
            ny,
            period,
            height,
            clustering,
        } = spec;
        if nx < 4 || nx % 2 != 0 {
            return Err(Error::invalid(format!("nx must be even and >= 4, got {nx}")));
        }
        if ny < 3 {
            return Err(Error::invalid(format!("ny must be >= 3, got {ny}")));
        }
        if !(period > 0.0 && period.is_finite() && height > 0.0 && height.is_finite()) {
            return Err(Error::invalid(format!(
                "channel dimensions must be positive, got period={period} height={height}"
            )));
        }
        let last = (ny - 1) as f64;
        let y: Vec<f64> = match clustering {
            Clustering::Uniform => (0..ny).map(|j| height * j as f64 / last).collect(),
            Clustering::Tanh { strength } => {
                if !(strength > 0.0 && strength.is_finite()) {
                    return Err(Error::invalid("tanh clustering strength must be positive"));
                }
                let t = strength.tanh();
                (0..ny)
                    .map(|j| {
                        let eta = j as f64 / last;
                        height * (1.0 - (strength * (1.0 - eta)).tanh() / t)
                    })
                    .collect()
            }
        };
        let mut y = y;
        y[0] = 0.0;
        y[ny - 1] = height;
        if y.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("y coordinates are not strictly increasing"));
        }

        let mut wy = vec![0.0; ny];
        for j in 0..ny - 1 {
            let h = y[j + 1] - y[j];
            wy[j] += 0.5 * h;
            wy[j + 1] += 0.5 * h;
        }

        let d1 = (0..ny)
            .map(|j| {
                if j == 0 {
                    let (h1, h2) = (y[1] - y[0], y[2] - y[1]);
                    Stencil {
                        start: 0,
                        coef: [
                            -(2.0 * h1 + h2) / (h1 * (h1 + h2)),
                            (h1 + h2) / (h1 * h2),
                            -h1 / (h2 * (h1 + h2)),
                        ],
                    }
                } else if j == ny - 1 {
                    let (h1, h2) = (y[j] - y[j - 1], y[j - 1] - y[j - 2]);
                    Stencil {
                        start: j - 2,
                        coef: [
                            h1 / (h2 * (h1 + h2)),
                            -(h1 + h2) / (h1 * h2),
                            (2.0 * h1 + h2) / (h1 * (h1 + h2)),
                        ],
                    }
                } else {
                    let (hm, hp) = (y[j] - y[j - 1], y[j + 1] - y[j]);
                    Stencil {
                        start: j - 1,
                        coef: [
                            -hp / (hm * (hm + hp)),
                            (hp - hm) / (hm * hp),
                            hm / (hp * (hm + hp)),
                        ],
                    }
                }
            })
            .collect();

        let d2 = (0..ny)
            .map(|j| {
                if j == 0 || j == ny - 1 {
                    [0.0; 3]
                } else {
                    let (hm, hp) = (y[j] - y[j - 1], y[j + 1] - y[j]);
                    [
                        2.0 / (hm * (hm + hp)),
                        -2.0 / (hm * hp),
                        2.0 / (hp * (hm + hp)),
                    ]
                }
            })
            .collect();

        let mut planner = FftPlanner::new();
        Ok(Grid {
            spec,
            y,
            wy,
            dx: period / nx as f64,
            d1,
            d2,
            fft_fwd: planner.plan_fft_forward(nx),
            fft_inv: planner.plan_fft_inverse(nx),
        })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }
    pub fn nx(&self) -> usize {
        self.spec.nx
    }
    pub fn ny(&self) -> usize {
        self.spec.ny
    }
    pub fn period(&self) -> f64 {
        self.spec.period
    }
    pub fn height(&self) -> f64 {
        self.spec.height
    }
    pub fn len(&self) -> usize {
        self.spec.nx * self.spec.ny
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn y_coords(&self) -> &[f64] {
        &self.y
    }
    pub fn x_coord(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }
    /// Smallest wall-normal spacing.
    pub fn dy_min(&self) -> f64 {
        self.y.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }
    /// Trapezoidal weights in `y`.
    pub fn y_weights(&self) -> &[f64] {
        &self.wy
    }
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.spec.nx + i
    }
    /// Area weight of node `(i, j)`.
    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let _ = i;
        self.dx * self.wy[j]
    }
    /// Per-node area weights in storage order.
    pub fn quad_weights(&self) -> Vec<f64> {
        let nx = self.spec.nx;
        (0..self.len()).map(|k| self.dx * self.wy[k / nx]).collect()
    }

    /// Angular wavenumber of FFT bin `m`; the Nyquist bin maps to `+nx/2`.
    pub fn wavenumber(&self, m: usize) -> f64 {
        let nx = self.spec.nx;
        let signed = if m <= nx / 2 { m as f64 } else { m as f64 - nx as f64 };
        2.0 * std::f64::consts::PI * signed / self.spec.period
    }

    pub(crate) fn d1_stencil(&self, j: usize) -> Stencil {
        self.d1[j]
    }
    pub(crate) fn d2_coef(&self, j: usize) -> [f64; 3] {
        self.d2[j]
    }

    /// Forward FFT of every row; output keeps the `j * nx + m` layout.
    pub fn rows_to_spectral(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        for row in buf.chunks_mut(self.spec.nx) {
            self.fft_fwd.process(row);
        }
        buf
    }

    /// Inverse of [`Grid::rows_to_spectral`], returning the real part.
    pub fn rows_from_spectral(&self, mut modes: Vec<Complex64>) -> Vec<f64> {
        let scale = 1.0 / self.spec.nx as f64;
        for row in modes.chunks_mut(self.spec.nx) {
            self.fft_inv.process(row);
        }
        modes.into_iter().map(|c| c.re * scale).collect()
    }
}
