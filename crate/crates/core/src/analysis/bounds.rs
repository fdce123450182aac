use crate::criteria::MSchedule;
use crate::error::{Error, Result};

use super::ErrorSeries;

/// `(C ν t, C (ν t + ∫0^t M_ν))`.
pub fn theorem_bounds(nu: f64, t: f64, m: &MSchedule, c_fit: f64) -> (f64, f64) {
    let thm1 = c_fit * nu * t;
    (thm1, thm1 + c_fit * m.integral(nu, t))
}

/// Smallest constant with `error(t) <= C (ν t + ∫0^t M)` on every sample with `t > 0`.
pub fn calibrate_c_fit(runs: &[(f64, &ErrorSeries)], m: &MSchedule) -> Result<f64> {
    let mut c: f64 = 0.0;
    let mut used = 0;
    for &(nu, series) in runs {
        for (&t, &e) in series.times.iter().zip(&series.values) {
            if t <= 0.0 {
                continue;
            }
            let (_, bound) = theorem_bounds(nu, t, m, 1.0);
            if !(bound > 0.0) {
                return Err(Error::invalid(format!("bound vanishes at nu={nu}, t={t}")));
            }
            c = c.max(e / bound);
            used += 1;
        }
    }
    if used == 0 {
        return Err(Error::invalid("calibration needs samples with t > 0"));
    }
    Ok(c)
}
