//! One-dimensional quadrature helpers on top of adaptive Clenshaw-Curtis.

/// Target absolute accuracy for all smooth 1D integrals in the crate.
pub const QUAD_TOL: f64 = 1e-14;

/// Integrates a smooth function over `[a, b]`; returns 0 for empty intervals.
///
/// The underlying rule has a fixed evaluation budget, so intervals whose
/// error estimate misses the tolerance are bisected.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    integrate_rec(&f, a, b, QUAD_TOL, 0)
}

fn integrate_rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let out = quadrature::clenshaw_curtis::integrate(f, a, b, tol);
    if out.error_estimate <= tol.max(1e-14 * out.integral.abs()) || depth >= 10 {
        return out.integral;
    }
    let m = 0.5 * (a + b);
    integrate_rec(f, a, m, 0.5 * tol, depth + 1) + integrate_rec(f, m, b, 0.5 * tol, depth + 1)
}

/// Integrates over `[a, b]` after splitting at the given interior breakpoints.
pub fn integrate_split<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64]) -> f64 {
    let mut pts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&p| p > a && p < b)
        .collect();
    pts.sort_by(|x, y| x.total_cmp(y));
    let mut lo = a;
    let mut total = 0.0;
    for p in pts.into_iter().chain(std::iter::once(b)) {
        total += integrate(&f, lo, p);
        lo = p;
    }
    total
}

/// Maximizes a unimodal function on `[a, b]` by golden-section search.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_exponential() {
        assert!((integrate(|x| x * x, 0.0, 3.0) - 9.0).abs() < 1e-13, "{}", integrate(|x| x * x, 0.0, 3.0) - 9.0);
        let v = integrate_split(|x| (-x / 1e-3).exp(), 0.0, 5.0, &[1e-3, 1e-2, 0.1]);
        assert!((v - 1e-3).abs() < 1e-17, "{v}");
    }

    #[test]
    fn golden_finds_peak() {
        let x = golden_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0);
        assert!((x - 0.3).abs() < 1e-7);
    }
}
