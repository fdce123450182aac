//! Compactly supported corrector in boundary-fitted coordinates `(ξ1, ξ2)`,
//! `ξ2` the distance to the wall and `h` the metric factor of `ξ1`.
//!
//! The stream function is
//!
//! ```text
//! Ψ = −U(ξ1) ∫0^ξ2 e^{−y/s} η(y) dy + γ U(ξ1) ∫0^ξ2 ψδ(y) dy,   γ = ∫0^δ e^{−y/s} η(y) dy
//! ```
//!
//! and the velocity is its orthogonal-coordinate curl `(∂2 Ψ, −(1/h) ∂1 Ψ)`,
//! which is annihilated by `div u = (1/h)(∂1 u1 + ∂2(h u2))`.

use std::fmt;
use std::sync::Arc;

use super::flat::Trace;
use super::mollifier::{Mollifier, SmoothCutoff};
use crate::error::{Error, Result};
use crate::field::{d_dx, d_dy, Grid, ScalarField, VectorField};
use crate::quad;

type MetricFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// Boundary chart of width `δ` with metric factor `h(ξ1, ξ2)`.
#[derive(Clone)]
pub struct CurvedChart {
    delta: f64,
    metric: Arc<MetricFn>,
    eta: SmoothCutoff,
    psi_delta: Mollifier,
}

impl fmt::Debug for CurvedChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurvedChart")
            .field("delta", &self.delta)
            .field("eta", &self.eta)
            .field("psi_delta", &self.psi_delta)
            .finish()
    }
}

impl CurvedChart {
    /// `η = 1` on `[0, δ/4]`, `η = 0` on `[δ/2, ∞)`; `ψδ` is a unit bump on `(δ/2, δ)`.
    pub fn new(delta: f64, metric: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::invalid(format!("chart width must be positive, got {delta}")));
        }
        Ok(CurvedChart {
            delta,
            metric: Arc::new(metric),
            eta: SmoothCutoff::new(0.25 * delta, 0.5 * delta),
            psi_delta: Mollifier::scaled(0.5 * delta, delta),
        })
    }

    /// Flat chart, `h ≡ 1`.
    pub fn flat(delta: f64) -> Result<Self> {
        Self::new(delta, |_, _| 1.0)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn metric(&self, xi1: f64, xi2: f64) -> f64 {
        (self.metric)(xi1, xi2)
    }
    pub fn eta(&self) -> &SmoothCutoff {
        &self.eta
    }
    pub fn psi_delta(&self) -> &Mollifier {
        &self.psi_delta
    }

    /// Metric sampled on the grid nodes; fails unless `h > 0` on the strip.
    pub fn metric_field(&self, grid: &Arc<Grid>) -> Result<ScalarField> {
        let h = ScalarField::from_fn(grid, |x, y| self.metric(x, y));
        let min = h.values().iter().copied().fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(Error::invalid(format!("chart metric must be positive, min h = {min}")));
        }
        Ok(h)
    }

    /// `∫0^z e^{−y/s} η(y) dy` for `z <= δ/2`.
    fn damped_cutoff_integral(&self, s: f64, z: f64) -> f64 {
        let (a, b) = self.eta.bounds();
        let z = z.min(b);
        let head = s * (1.0 - (-z.min(a) / s).exp());
        let tail = if z > a {
            quad::integrate(|y| (-y / s).exp() * self.eta.value(y), a, z)
        } else {
            0.0
        };
        head + tail
    }
}

/// `γ = ∫0^δ e^{−y/ατ} η(y) dy`.
pub fn curved_gamma(alpha: f64, tau: f64, chart: &CurvedChart) -> Result<f64> {
    let s = alpha * tau;
    if !(s > 0.0) {
        return Err(Error::invalid("curved gamma needs alpha*tau > 0"));
    }
    Ok(chart.damped_cutoff_integral(s, chart.delta))
}

/// `ln(ατ − γ)`, evaluated in log space so that exponentially small gaps survive.
///
/// `ατ − γ = ∫_{δ/4}^∞ e^{−y/s} (1 − η(y)) dy > 0`.
pub fn curved_gamma_deficit_ln(alpha: f64, tau: f64, chart: &CurvedChart) -> Result<f64> {
    let s = alpha * tau;
    if !(s > 0.0) {
        return Err(Error::invalid("curved gamma needs alpha*tau > 0"));
    }
    let (a, b) = chart.eta.bounds();
    let log_integrand = |y: f64| -y / s + chart.eta.ln_complement(y);
    let peak = quad::golden_max(log_integrand, a, b);
    let lmax = log_integrand(peak).max(-b / s);
    let scaled = |y: f64| (log_integrand(y) - lmax).exp();
    let ramp = quad::integrate(scaled, a, peak) + quad::integrate(scaled, peak, b);
    // ∫_b^∞ e^{−y/s} dy = s e^{−b/s}
    let tail = (s.ln() - b / s - lmax).exp();
    Ok(lmax + (ramp + tail).ln())
}

/// The curved corrector on a `(ξ1, ξ2)` grid; identically zero for `ξ2 >= δ`.
pub fn curved_corrector(
    trace: &Trace,
    alpha: f64,
    tau: f64,
    chart: &CurvedChart,
    grid: &Arc<Grid>,
) -> Result<VectorField> {
    if trace.len() != grid.nx() {
        return Err(Error::Mismatch("trace length differs from nx".into()));
    }
    if !(tau > 0.0) {
        return Err(Error::invalid("curved corrector needs tau > 0"));
    }
    let h = chart.metric_field(grid)?;
    let s = alpha * tau;
    let gamma = curved_gamma(alpha, tau, chart)?;
    let delta = chart.delta;
    let (_, eta_end) = chart.eta.bounds();
    let nx = grid.nx();
    let mut c1 = Vec::with_capacity(grid.len());
    let mut c2 = Vec::with_capacity(grid.len());
    for (j, &y) in grid.y_coords().iter().enumerate() {
        if y >= delta {
            c1.extend(std::iter::repeat_n(0.0, nx));
            c2.extend(std::iter::repeat_n(0.0, nx));
            continue;
        }
        let profile1 = -(-y / s).exp() * chart.eta.value(y) + gamma * chart.psi_delta.value(y);
        let stream = if y >= eta_end {
            gamma * (1.0 - chart.psi_delta.cumulative(y))
        } else {
            chart.damped_cutoff_integral(s, y) - gamma * chart.psi_delta.cumulative(y)
        };
        for i in 0..nx {
            let u = trace.values[i];
            c1.push(if j == 0 { -u } else { u * profile1 });
            c2.push(trace.dx[i] * stream / h.at(i, j));
        }
    }
    Ok(VectorField {
        comp1: ScalarField::from_values_unchecked(grid, c1),
        comp2: ScalarField::from_values_unchecked(grid, c2),
    })
}

/// Discrete `(1/h)(∂1 u1 + ∂2(h u2))`.
pub fn curved_divergence(vel: &VectorField, chart: &CurvedChart) -> Result<ScalarField> {
    let h = chart.metric_field(vel.grid())?;
    let flux = d_dx(&vel.comp1).add(&d_dy(&h.mul(&vel.comp2)));
    Ok(flux.zip_with(&h, |f, hv| f / hv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corrector::flat::{flat_corrector, CorrectorParams};
    use crate::field::{lp_norm, make_channel_grid, Clustering, Region};
    use std::f64::consts::PI;

    fn cos_trace(g: &Grid) -> Trace {
        Trace::from_fn(g, |x| x.cos(), |x| -x.sin(), |x| -x.cos())
    }

    #[test]
    fn zero_trace_and_zero_cutoff() {
        let g = make_channel_grid(8, 33, 2.0 * PI, 1.0, Clustering::Uniform).unwrap();
        let chart = CurvedChart::new(0.5, |_, y| 1.0 + y).unwrap();
        let phi = curved_corrector(&Trace::zeros(8), 0.1, 1.0, &chart, &g).unwrap();
        assert!(phi.comp1.values().iter().chain(phi.comp2.values()).all(|&v| v == 0.0));
    }

    #[test]
    fn gamma_closed_form_for_wide_cutoff() {
        // η ≡ 1 on [0, δ/4]: for ατ ≪ δ the integral is s (1 − e^{−δ/(4s)}) + tiny
        let chart = CurvedChart::flat(1.0).unwrap();
        let s = 1e-3;
        let g = curved_gamma(s, 1.0, &chart).unwrap();
        assert!((g - s * (1.0 - (-1.0f64 / s).exp())).abs() < 1e-15);
        // a large ατ sees the whole cutoff
        let big = curved_gamma(1.0, 1e3, &chart).unwrap();
        let direct = quad::integrate(|y| chart.eta().value(y), 0.0, 1.0);
        assert!((big - direct).abs() < 2e-3 * direct);
    }

    #[test]
    fn gamma_monotone_in_thickness() {
        let chart = CurvedChart::flat(0.5).unwrap();
        let mut last = 0.0;
        for s in [1e-4, 1e-3, 1e-2, 0.1, 1.0] {
            let g = curved_gamma(s, 1.0, &chart).unwrap();
            assert!(g >= last);
            last = g;
        }
    }

    #[test]
    fn deficit_matches_direct_where_representable() {
        let chart = CurvedChart::flat(0.5).unwrap();
        let s = 0.05;
        let direct = s - curved_gamma(s, 1.0, &chart).unwrap();
        let ln = curved_gamma_deficit_ln(s, 1.0, &chart).unwrap();
        assert!((ln.exp() - direct).abs() < 1e-9 * direct, "{} vs {direct}", ln.exp());
    }

    #[test]
    fn wall_values_and_support() {
        let g = make_channel_grid(16, 129, 2.0 * PI, 1.0, Clustering::Uniform).unwrap();
        let chart = CurvedChart::new(0.5, |_, y| 1.0 + y).unwrap();
        let tr = cos_trace(&g);
        let phi = curved_corrector(&tr, 0.05, 1.0, &chart, &g).unwrap();
        for i in 0..16 {
            assert_eq!(phi.comp1.at(i, 0), -tr.values[i]);
            assert_eq!(phi.comp2.at(i, 0), 0.0);
        }
        for (j, &y) in g.y_coords().iter().enumerate() {
            if y >= 0.5 {
                for i in 0..16 {
                    assert_eq!(phi.comp1.at(i, j), 0.0);
                    assert_eq!(phi.comp2.at(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn unit_metric_wall_matches_flat() {
        let g = make_channel_grid(16, 65, 2.0 * PI, 6.0, Clustering::Uniform).unwrap();
        let tr = cos_trace(&g);
        let chart = CurvedChart::flat(2.0).unwrap();
        let curved = curved_corrector(&tr, 0.1, 1.0, &chart, &g).unwrap();
        let flat = flat_corrector(&CorrectorParams::new(0.1, 1.0, tr).unwrap(), &g).unwrap();
        for i in 0..16 {
            assert_eq!(curved.comp1.at(i, 0), flat.comp1.at(i, 0));
            assert_eq!(curved.comp2.at(i, 0), flat.comp2.at(i, 0));
        }
    }

    #[test]
    fn rejects_nonpositive_metric() {
        let g = make_channel_grid(8, 9, 2.0 * PI, 1.0, Clustering::Uniform).unwrap();
        let chart = CurvedChart::new(0.5, |_, y| 0.5 - y).unwrap();
        assert!(curved_corrector(&cos_trace(&g), 0.1, 1.0, &chart, &g).is_err());
    }

    #[test]
    fn divergence_converges() {
        let chart = CurvedChart::new(0.5, |x: f64, y| 1.0 + y + 0.2 * x.sin() * y).unwrap();
        let mut errs = vec![];
        for ny in [65, 129, 257] {
            let g = make_channel_grid(16, ny, 2.0 * PI, 1.0, Clustering::Uniform).unwrap();
            let phi = curved_corrector(&cos_trace(&g), 0.05, 1.0, &chart, &g).unwrap();
            let div = curved_divergence(&phi, &chart).unwrap();
            errs.push(lp_norm(&div, 2.0, &Region::full(&g)).unwrap());
        }
        for w in errs.windows(2) {
            assert!((w[0] / w[1]).log2() > 1.9, "{errs:?}");
        }
    }
}
