use crate::error::{Error, Result};
use crate::quad;

/// Samples `(t_k, y(t_k))`, `t_k = k T / n`, of the solution of
/// `y' = 2 c y + 2 f(t)`, `y(0) = 0`.
///
/// Each interval is propagated with the integrating factor, the remaining
/// integral evaluated by adaptive quadrature.
pub fn gronwall_envelope(c_growth: f64, forcing: impl Fn(f64) -> f64, horizon: f64, n: usize) -> Result<Vec<(f64, f64)>> {
    if !(c_growth >= 0.0 && c_growth.is_finite()) {
        return Err(Error::invalid(format!("growth constant must be >= 0, got {c_growth}")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) || n == 0 {
        return Err(Error::invalid("envelope needs a positive horizon and at least one interval"));
    }
    let dt = horizon / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    let mut y = 0.0;
    out.push((0.0, 0.0));
    for k in 0..n {
        let (a, b) = (k as f64 * dt, (k + 1) as f64 * dt);
        let inc = quad::integrate(|s| (2.0 * c_growth * (b - s)).exp() * forcing(s), a, b);
        y = (2.0 * c_growth * dt).exp() * y + 2.0 * inc;
        out.push((b, y));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn closed_forms() {
        for (t, y) in gronwall_envelope(0.7, |_| 0.0, 2.0, 10).unwrap() {
            assert_eq!(y, 0.0, "t={t}");
        }
        for (t, y) in gronwall_envelope(0.0, |_| 0.3, 2.0, 10).unwrap() {
            assert!((y - 0.6 * t).abs() < 1e-14);
        }
        for (t, y) in gronwall_envelope(1.0, |_| 1.0, 3.0, 30).unwrap() {
            assert!((y - (2.0 * t).exp_m1()).abs() < 1e-8 * (1.0 + y));
        }
        assert!(gronwall_envelope(-1.0, |_| 1.0, 1.0, 4).is_err());
    }

    proptest! {
        #[test]
        fn monotone_in_forcing(c in 0.0f64..2.0, a in 0.0f64..1.0, w in 0.0f64..5.0, extra in 0.0f64..1.0) {
            let f = |t: f64| a * (1.0 + (w * t).sin());
            let g = |t: f64| f(t) + extra * t;
            let lo = gronwall_envelope(c, f, 1.5, 15).unwrap();
            let hi = gronwall_envelope(c, g, 1.5, 15).unwrap();
            for ((_, y1), (_, y2)) in lo.iter().zip(&hi) {
                prop_assert!(y2 >= y1);
            }
        }
    }
}
