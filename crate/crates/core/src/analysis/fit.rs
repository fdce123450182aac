use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// Samples as `(x, y)`, e.g. `(ν, sup error)`.
    #[serde(skip)]
    pub samples: Vec<(f64, f64)>,
    pub exponent: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub n_samples: usize,
}

/// Ordinary least squares `y ≈ a + b x`; returns `(b, a, rms residual)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    (slope, intercept, (ss / n).sqrt())
}

/// Fits `error ≈ e^{intercept} ν^{exponent}` on at least three positive samples.
pub fn fit_rate(samples: &[(f64, f64)]) -> Result<RateFit> {
    if samples.len() < 3 {
        return Err(Error::invalid(format!(
            "rate fit needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    if samples
        .iter()
        .any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()))
    {
        return Err(Error::invalid("rate fit samples must be positive and finite"));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    if xs.iter().all(|&x| x == xs[0]) {
        return Err(Error::invalid("rate fit needs at least two distinct abscissae"));
    }
    let (exponent, intercept, residual) = linear_fit(&xs, &ys);
    Ok(RateFit {
        samples: samples.to_vec(),
        exponent,
        intercept,
        residual,
        n_samples: samples.len(),
    })
}

/// Observed convergence order between successive refinements with ratio `ratio`.
pub fn observed_orders(errors: &[f64], ratio: f64) -> Vec<f64> {
    errors
        .windows(2)
        .map(|w| (w[0] / w[1]).ln() / ratio.ln())
        .collect()
}
