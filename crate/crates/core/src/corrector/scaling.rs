//! Measured `L^p` scaling of the flat corrector against its layer thickness.
//!
//! The corrector is separable, `φ1 = −U(x1) g1(x2)` and `φ2 = ∂1U(x1) g2(x2)`,
//! so each norm factors into a periodic sum over the trace samples and a 1D
//! wall-normal integral evaluated by adaptive quadrature.

use std::fmt::Write as _;
use std::path::Path;

use super::flat::Trace;
use super::mollifier::make_mollifier;
use crate::analysis::fit::linear_fit;
use crate::error::{Error, Result};
use crate::quad;

/// The five corrector quantities whose scaling is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrectorQuantity {
    Phi1,
    D1Phi1,
    D2Phi1,
    Phi2,
    D1Phi2,
}

impl CorrectorQuantity {
    pub const ALL: [CorrectorQuantity; 5] = [
        CorrectorQuantity::Phi1,
        CorrectorQuantity::D1Phi1,
        CorrectorQuantity::D2Phi1,
        CorrectorQuantity::Phi2,
        CorrectorQuantity::D1Phi2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CorrectorQuantity::Phi1 => "phi1",
            CorrectorQuantity::D1Phi1 => "d1_phi1",
            CorrectorQuantity::D2Phi1 => "d2_phi1",
            CorrectorQuantity::Phi2 => "phi2",
            CorrectorQuantity::D1Phi2 => "d1_phi2",
        }
    }

    /// Power of `ατ` bounding the `L^p` norm.
    pub fn expected_exponent(self, p: f64) -> f64 {
        let inv = if p.is_infinite() { 0.0 } else { 1.0 / p };
        match self {
            CorrectorQuantity::Phi1 | CorrectorQuantity::D1Phi1 => inv,
            CorrectorQuantity::D2Phi1 => inv - 1.0,
            CorrectorQuantity::Phi2 | CorrectorQuantity::D1Phi2 => 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub quantity: CorrectorQuantity,
    pub p: f64,
    pub fitted_exponent: f64,
    pub expected_exponent: f64,
    pub residual: f64,
    /// `(ατ, norm)` samples behind the fit.
    pub samples: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
}

fn fmt_p(p: f64) -> String {
    if p.is_infinite() {
        "inf".to_string()
    } else {
        format!("{p}")
    }
}

impl ScalingReport {
    pub fn row(&self, q: CorrectorQuantity, p: f64) -> Option<&ScalingRow> {
        self.rows.iter().find(|r| r.quantity == q && r.p == p)
    }

    pub fn extend(&mut self, other: ScalingReport) {
        self.rows.extend(other.rows);
    }

    /// CSV with columns `quantity,p,fitted_exponent,expected_exponent,residual`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("quantity,p,fitted_exponent,expected_exponent,residual\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{:e},{:e},{:e}",
                r.quantity.name(),
                fmt_p(r.p),
                r.fitted_exponent,
                r.expected_exponent,
                r.residual
            );
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Periodic `L^p` norm of trace samples on a period of length `period`.
fn periodic_norm(samples: &[f64], p: f64, period: f64) -> f64 {
    if p.is_infinite() {
        return samples.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let w = period / samples.len() as f64;
    (samples.iter().map(|v| v.abs().powf(p)).sum::<f64>() * w).powf(1.0 / p)
}

/// `L^p(0, height)` norm of a wall-normal profile with layer scale `s`.
fn profile_norm(g: &dyn Fn(f64) -> f64, p: f64, s: f64, height: f64) -> f64 {
    let mut breaks = vec![s, 3.0 * s, 10.0 * s, 30.0 * s, 100.0 * s, 0.5, 1.0, 2.25, 3.0, 4.0];
    breaks.retain(|&b| b < height);
    if p.is_infinite() {
        // dense log/linear sampling, then golden refinement around the best node
        let mut pts = vec![0.0];
        let lo = (s * 1e-3).ln();
        let hi = height.ln();
        pts.extend((0..=4000).map(|k| (lo + (hi - lo) * k as f64 / 4000.0).exp()));
        pts.extend((0..=4000).map(|k| height * k as f64 / 4000.0));
        pts.sort_by(|a, b| a.total_cmp(b));
        let (k, _) = pts
            .iter()
            .enumerate()
            .max_by(|a, b| g(*a.1).abs().total_cmp(&g(*b.1).abs()))
            .expect("non-empty sampling");
        let a = if k == 0 { pts[0] } else { pts[k - 1] };
        let b = if k + 1 < pts.len() { pts[k + 1] } else { pts[k] };
        let y = quad::golden_max(|y| g(y).abs(), a, b);
        return g(y).abs().max(g(pts[k]).abs());
    }
    let h = |y: f64| g(y).abs().powf(p);
    quad::integrate_split(h, 0.0, height, &breaks).powf(1.0 / p)
}

/// Fits `ln ‖·‖_{L^p}` against `ln(ατ)` for the five corrector quantities.
///
/// `period` is the `x1` period of the trace samples and `height` the extent
/// of the wall-normal integration (at least the bump support, `4`).
pub fn verify_corrector_scalings(
    p: f64,
    alpha_tau_samples: &[f64],
    trace: &Trace,
    period: f64,
    height: f64,
) -> Result<ScalingReport> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::invalid(format!("Lp exponent must be >= 1, got {p}")));
    }
    if alpha_tau_samples.len() < 3 {
        return Err(Error::invalid("scaling study needs at least 3 samples"));
    }
    if alpha_tau_samples.iter().any(|&s| !(s > 0.0 && s <= 1.0)) {
        return Err(Error::invalid("alpha*tau samples must lie in (0, 1]"));
    }
    if height < 4.0 {
        return Err(Error::invalid("integration height must cover the bump support [1/2, 4]"));
    }
    let psi = make_mollifier();
    let nu_x = periodic_norm(&trace.values, p, period);
    let ndu_x = periodic_norm(&trace.dx, p, period);
    let nddu_x = periodic_norm(&trace.dxx, p, period);
    if nu_x == 0.0 || ndu_x == 0.0 {
        return Err(Error::invalid("scaling study needs a non-constant, non-zero trace"));
    }

    let mut report = ScalingReport::default();
    for q in CorrectorQuantity::ALL {
        let samples: Vec<(f64, f64)> = alpha_tau_samples
            .iter()
            .map(|&s| {
                let g1 = move |y: f64| (-y / s).exp() - s * psi.value(y);
                let dg1 = move |y: f64| -(-y / s).exp() / s - s * psi.derivative(y);
                let g2 = move |y: f64| s * ((1.0 - psi.cumulative(y)) - (-y / s).exp());
                let norm = match q {
                    CorrectorQuantity::Phi1 => nu_x * profile_norm(&g1, p, s, height),
                    CorrectorQuantity::D1Phi1 => ndu_x * profile_norm(&g1, p, s, height),
                    CorrectorQuantity::D2Phi1 => nu_x * profile_norm(&dg1, p, s, height),
                    CorrectorQuantity::Phi2 => ndu_x * profile_norm(&g2, p, s, height),
                    CorrectorQuantity::D1Phi2 => nddu_x * profile_norm(&g2, p, s, height),
                };
                (s, norm)
            })
            .collect();
        let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
        let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
        let (slope, _, residual) = linear_fit(&xs, &ys);
        report.rows.push(ScalingRow {
            quantity: q,
            p,
            fitted_exponent: slope,
            expected_exponent: q.expected_exponent(p),
            residual,
            samples,
        });
    }
    Ok(report)
}
