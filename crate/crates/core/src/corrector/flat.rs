//! Exponential boundary-layer corrector on the flat wall.
//!
//! With `s = ατ` and the unit-mass bump `ψ` on `[1/2, 4]`:
//!
//! ```text
//! φ1 = −U(x1) (e^{−x2/s} − s ψ(x2))
//! φ2 =  s ∂1U(x1) ((1 − ∫0^x2 ψ) − e^{−x2/s})
//! ```
//!
//! so that `φ1 = −U`, `φ2 = 0` on the wall and `∂1 φ1 + ∂2 φ2 = 0` identically.

use std::sync::Arc;

use rustfft::num_complex::Complex64;

use super::mollifier::{make_mollifier, Mollifier};
use crate::error::{Error, Result};
use crate::field::{Grid, ScalarField, VectorField};

/// `τ(t) = min{t, 1}`.
#[inline]
pub fn tau(t: f64) -> f64 {
    t.min(1.0)
}

/// Periodic wall trace `U(x1)` with its first two `x1`-derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub values: Vec<f64>,
    pub dx: Vec<f64>,
    pub dxx: Vec<f64>,
}

impl Trace {
    /// Samples on the grid's `x1` nodes; derivatives are computed spectrally.
    pub fn from_samples(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nx() {
            return Err(Error::Mismatch(format!(
                "trace has {} samples, grid has nx={}",
                values.len(),
                grid.nx()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("trace samples must be finite"));
        }
        let nx = grid.nx();
        let modes = grid.rows_to_spectral(&values);
        let deriv = |order: i32| {
            let m: Vec<Complex64> = modes
                .iter()
                .enumerate()
                .map(|(m, &c)| {
                    if m == nx / 2 && order % 2 == 1 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        c * Complex64::new(0.0, grid.wavenumber(m)).powi(order)
                    }
                })
                .collect();
            grid.rows_from_spectral(m)
        };
        Ok(Trace {
            dx: deriv(1),
            dxx: deriv(2),
            values,
        })
    }

    /// Samples an analytic trace and its derivatives.
    pub fn from_fn(
        grid: &Grid,
        f: impl Fn(f64) -> f64,
        df: impl Fn(f64) -> f64,
        ddf: impl Fn(f64) -> f64,
    ) -> Self {
        let xs: Vec<f64> = (0..grid.nx()).map(|i| grid.x_coord(i)).collect();
        Trace {
            values: xs.iter().map(|&x| f(x)).collect(),
            dx: xs.iter().map(|&x| df(x)).collect(),
            dxx: xs.iter().map(|&x| ddf(x)).collect(),
        }
    }

    pub fn zeros(nx: usize) -> Self {
        Trace {
            values: vec![0.0; nx],
            dx: vec![0.0; nx],
            dxx: vec![0.0; nx],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().chain(&self.dx).all(|&v| v == 0.0)
    }
}

/// Parameters of the flat corrector at one instant.
#[derive(Clone, Debug)]
pub struct CorrectorParams {
    alpha: f64,
    t: f64,
    trace: Trace,
}

impl CorrectorParams {
    pub fn new(alpha: f64, t: f64, trace: Trace) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::invalid(format!("corrector time must be >= 0, got {t}")));
        }
        Ok(CorrectorParams { alpha, t, trace })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn tau(&self) -> f64 {
        tau(self.t)
    }
    /// Layer thickness `ατ`.
    pub fn thickness(&self) -> f64 {
        self.alpha * self.tau()
    }
    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        if self.trace.len() != grid.nx() {
            return Err(Error::Mismatch(format!(
                "trace has {} samples, grid has nx={}",
                self.trace.len(),
                grid.nx()
            )));
        }
        Ok(())
    }
}

/// Wall-normal profiles shared by the flat corrector and its derivatives.
pub(crate) struct FlatProfiles {
    /// `e^{−y/s}`
    pub decay: Vec<f64>,
    pub bump: Vec<f64>,
    /// `1 − ∫0^y ψ`
    pub bump_tail: Vec<f64>,
}

impl FlatProfiles {
    pub fn new(y: &[f64], s: f64, psi: &Mollifier) -> Self {
        FlatProfiles {
            decay: y.iter().map(|&y| (-y / s).exp()).collect(),
            bump: y.iter().map(|&y| psi.value(y)).collect(),
            bump_tail: y.iter().map(|&y| 1.0 - psi.cumulative(y)).collect(),
        }
    }
}

fn separable(grid: &Arc<Grid>, xs: &[f64], ys: impl Fn(usize) -> f64) -> ScalarField {
    let nx = grid.nx();
    let mut v = Vec::with_capacity(grid.len());
    for j in 0..grid.ny() {
        let g = ys(j);
        v.extend(xs.iter().take(nx).map(|&u| u * g));
    }
    ScalarField::from_values_unchecked(grid, v)
}

/// The corrector `φ` on `grid`. At `t = 0` it is the zero field.
pub fn flat_corrector(params: &CorrectorParams, grid: &Arc<Grid>) -> Result<VectorField> {
    params.check_grid(grid)?;
    if params.t() == 0.0 {
        return Ok(VectorField::zeros(grid));
    }
    let s = params.thickness();
    let p = FlatProfiles::new(grid.y_coords(), s, &make_mollifier());
    let tr = params.trace();
    let neg_u: Vec<f64> = tr.values.iter().map(|u| -u).collect();
    let comp1 = separable(grid, &neg_u, |j| p.decay[j] - s * p.bump[j]);
    let comp2 = separable(grid, &tr.dx, |j| s * (p.bump_tail[j] - p.decay[j]));
    Ok(VectorField { comp1, comp2 })
}

/// Analytic `∂2 φ1 = (U/s) e^{−x2/s} + s U ψ'(x2)`.
pub fn flat_corrector_wall_gradient(params: &CorrectorParams, grid: &Arc<Grid>) -> Result<ScalarField> {
    params.check_grid(grid)?;
    if params.t() == 0.0 {
        return Err(Error::invalid("the wall gradient needs tau > 0"));
    }
    let s = params.thickness();
    let psi = make_mollifier();
    let y = grid.y_coords();
    Ok(separable(grid, &params.trace().values, |j| {
        (-y[j] / s).exp() / s + s * psi.derivative(y[j])
    }))
}

/// Time derivative of the corrector.
#[derive(Clone, Debug)]
pub struct CorrectorRate {
    pub field: VectorField,
    /// Set at `t = 1`, where `τ` has a corner and the left derivative is returned.
    pub one_sided: bool,
}

/// Analytic `∂t φ` given `∂t U` on the same `x1` samples.
pub fn corrector_time_derivative(
    params: &CorrectorParams,
    grid: &Arc<Grid>,
    du_dt: &Trace,
) -> Result<CorrectorRate> {
    params.check_grid(grid)?;
    if du_dt.len() != grid.nx() {
        return Err(Error::Mismatch("dU/dt trace length differs from nx".into()));
    }
    let t = params.t();
    if t <= 0.0 {
        return Err(Error::invalid("corrector time derivative needs t > 0"));
    }
    let s = params.thickness();
    let ds = if t <= 1.0 { params.alpha() } else { 0.0 };
    let p = FlatProfiles::new(grid.y_coords(), s, &make_mollifier());
    let y = grid.y_coords();
    let tr = params.trace();
    let nx = grid.nx();
    let mut c1 = Vec::with_capacity(grid.len());
    let mut c2 = Vec::with_capacity(grid.len());
    for j in 0..grid.ny() {
        let de = p.decay[j] * y[j] * ds / (s * s);
        let g1 = p.decay[j] - s * p.bump[j];
        let dg1 = de - ds * p.bump[j];
        let g2 = p.bump_tail[j] - p.decay[j];
        for i in 0..nx {
            c1.push(-du_dt.values[i] * g1 - tr.values[i] * dg1);
            c2.push(ds * tr.dx[i] * g2 + s * du_dt.dx[i] * g2 - s * tr.dx[i] * de);
        }
    }
    Ok(CorrectorRate {
        field: VectorField {
            comp1: ScalarField::from_values_unchecked(grid, c1),
            comp2: ScalarField::from_values_unchecked(grid, c2),
        },
        one_sided: t == 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{d_dy, divergence2d, lp_norm, make_channel_grid, Clustering, Region};
    use std::f64::consts::PI;

    fn cos_trace(g: &Grid) -> Trace {
        Trace::from_fn(g, |x| x.cos(), |x| -x.sin(), |x| -x.cos())
    }

    #[test]
    fn zero_trace_gives_zero_field() {
        let g = make_channel_grid(8, 17, 2.0 * PI, 6.0, Clustering::Uniform).unwrap();
        let p = CorrectorParams::new(0.3, 0.5, Trace::zeros(8)).unwrap();
        let phi = flat_corrector(&p, &g).unwrap();
        assert!(phi.comp1.values().iter().chain(phi.comp2.values()).all(|&v| v == 0.0));
        let d = flat_corrector_wall_gradient(&p, &g).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));
        let r = corrector_time_derivative(&p, &g, &Trace::zeros(8)).unwrap();
        assert!(r.field.comp1.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_at_initial_time_and_invalid_params() {
        let g = make_channel_grid(8, 9, 2.0 * PI, 6.0, Clustering::Uniform).unwrap();
        let p = CorrectorParams::new(0.3, 0.0, cos_trace(&g)).unwrap();
        assert_eq!(flat_corrector(&p, &g).unwrap().energy(), 0.0);
        assert!(CorrectorParams::new(0.3, -1.0, cos_trace(&g)).is_err());
        assert!(CorrectorParams::new(0.0, 1.0, cos_trace(&g)).is_err());
        assert!(CorrectorParams::new(1.5, 1.0, cos_trace(&g)).is_err());
    }

    #[test]
    fn wall_matching_is_exact() {
        let g = make_channel_grid(16, 33, 2.0 * PI, 6.0, Clustering::Tanh { strength: 2.0 }).unwrap();
        let tr = Trace::from_samples(&g, (0..16).map(|i| 0.3 + (i as f64 * 0.7).sin()).collect()).unwrap();
        let p = CorrectorParams::new(0.2, 0.4, tr.clone()).unwrap();
        let phi = flat_corrector(&p, &g).unwrap();
        for i in 0..16 {
            assert_eq!(phi.comp1.at(i, 0), -tr.values[i]);
            assert_eq!(phi.comp2.at(i, 0), 0.0);
        }
    }

    #[test]
    fn wall_gradient_formula() {
        let g = make_channel_grid(8, 9, 2.0 * PI, 6.0, Clustering::Uniform).unwrap();
        let tr = Trace::from_fn(&g, |_| 1.0, |_| 0.0, |_| 0.0);
        let p = CorrectorParams::new(0.5, 0.2, tr).unwrap();
        let d = flat_corrector_wall_gradient(&p, &g).unwrap();
        assert_eq!(d.at(3, 0), 1.0 / 0.1);
    }

    #[test]
    fn wall_gradient_agrees_with_finite_differences() {
        let mut errs = vec![];
        for ny in [513, 1025, 2049] {
            let g = make_channel_grid(8, ny, 2.0 * PI, 6.0, Clustering::Tanh { strength: 2.5 }).unwrap();
            let p = CorrectorParams::new(0.1, 1.0, cos_trace(&g)).unwrap();
            let phi = flat_corrector(&p, &g).unwrap();
            let fd = d_dy(&phi.comp1);
            let exact = flat_corrector_wall_gradient(&p, &g).unwrap();
            errs.push(lp_norm(&fd.sub(&exact), 2.0, &Region::full(&g)).unwrap());
        }
        for w in errs.windows(2) {
            assert!((w[0] / w[1]).log2() > 1.75, "{errs:?}");
        }
    }

    #[test]
    fn divergence_converges_at_second_order() {
        let mut errs = vec![];
        for ny in [65, 129, 257, 513] {
            let g = make_channel_grid(16, ny, 2.0 * PI, 6.0, Clustering::Uniform).unwrap();
            let p = CorrectorParams::new(0.1, 1.0, cos_trace(&g)).unwrap();
            let phi = flat_corrector(&p, &g).unwrap();
            errs.push(lp_norm(&divergence2d(&phi), 2.0, &Region::full(&g)).unwrap());
        }
        for w in errs.windows(2) {
            assert!((w[0] / w[1]).log2() > 1.9, "{errs:?}");
        }
    }

    #[test]
    fn frozen_after_unit_time() {
        let g = make_channel_grid(8, 17, 2.0 * PI, 6.0, Clustering::Uniform).unwrap();
        let p = CorrectorParams::new(0.2, 1.7, cos_trace(&g)).unwrap();
        let r = corrector_time_derivative(&p, &g, &Trace::zeros(8)).unwrap();
        assert!(!r.one_sided);
        assert!(r.field.comp1.values().iter().chain(r.field.comp2.values()).all(|&v| v == 0.0));
        let p1 = CorrectorParams::new(0.2, 1.0, cos_trace(&g)).unwrap();
        assert!(corrector_time_derivative(&p1, &g, &Trace::zeros(8)).unwrap().one_sided);
    }

    #[test]
    fn time_derivative_matches_central_difference() {
        let g = make_channel_grid(16, 65, 2.0 * PI, 6.0, Clustering::Tanh { strength: 2.0 }).unwrap();
        let trace_at = |t: f64| Trace::from_fn(&g, |x| x.cos() * (1.0 + t), |x| -x.sin() * (1.0 + t), |x| -x.cos() * (1.0 + t));
        let alpha = 0.3;
        let t = 0.5;
        let exact = corrector_time_derivative(
            &CorrectorParams::new(alpha, t, trace_at(t)).unwrap(),
            &g,
            &Trace::from_fn(&g, |x| x.cos(), |x| -x.sin(), |x| -x.cos()),
        )
        .unwrap()
        .field;
        let mut errs = vec![];
        for h in [4e-2, 2e-2, 1e-2] {
            let fp = flat_corrector(&CorrectorParams::new(alpha, t + h, trace_at(t + h)).unwrap(), &g).unwrap();
            let fm = flat_corrector(&CorrectorParams::new(alpha, t - h, trace_at(t - h)).unwrap(), &g).unwrap();
            let fd = fp.sub(&fm).scale(0.5 / h);
            errs.push(fd.sub(&exact).energy().sqrt());
        }
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((order - 2.0).abs() < 0.1, "{errs:?}");
        }
    }
}
