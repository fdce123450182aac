use super::fields::ScalarField;
use super::region::Region;
use crate::error::{Error, Result};

/// Weighted `L^p` norm of `field` restricted to `region`.
///
/// Finite `p` uses `(Σ mask |f|^p w)^{1/p}` with the trapezoid-by-uniform node
/// weights; `p = ∞` is the node-wise maximum of `|f|` over the mask. An empty
/// region has norm zero. Sums run row by row in a fixed order.
pub fn lp_norm(field: &ScalarField, p: f64, region: &Region) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::invalid(format!("Lp exponent must be >= 1, got {p}")));
    }
    if region.grid().spec() != field.grid().spec() {
        return Err(Error::Mismatch("region and field grids differ".into()));
    }
    let grid = field.grid();
    let nx = grid.nx();
    let vals = field.values();
    if p.is_infinite() {
        return Ok(vals
            .iter()
            .enumerate()
            .filter(|(k, _)| region.contains(*k))
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max));
    }
    let wy = grid.y_weights();
    let mut total = 0.0;
    for (j, row) in vals.chunks(nx).enumerate() {
        let mut row_sum = 0.0;
        for (i, &v) in row.iter().enumerate() {
            if region.contains(j * nx + i) {
                row_sum += if p == 1.0 {
                    v.abs()
                } else if p == 2.0 {
                    v * v
                } else {
                    v.abs().powf(p)
                };
            }
        }
        total += row_sum * wy[j];
    }
    total *= grid.dx();
    Ok(if p == 1.0 {
        total
    } else if p == 2.0 {
        total.sqrt()
    } else {
        total.powf(1.0 / p)
    })
}

/// Parses `"inf"`/`"infinity"` or a number `>= 1`.
pub fn parse_exponent(s: &str) -> Result<f64> {
    let t = s.trim().to_ascii_lowercase();
    let p = if t == "inf" || t == "infinity" || t == "∞" {
        f64::INFINITY
    } else {
        t.parse::<f64>()
            .map_err(|_| Error::invalid(format!("not an Lp exponent: {s}")))?
    };
    if p.is_nan() || p < 1.0 {
        return Err(Error::invalid(format!("Lp exponent must be >= 1, got {s}")));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_channel_grid, Clustering, Region};

    #[test]
    fn constant_fields() {
        let g = make_channel_grid(8, 5, 1.0, 1.0, Clustering::Uniform).unwrap();
        let one = ScalarField::from_fn(&g, |_, _| 1.0);
        assert!((lp_norm(&one, 2.0, &Region::full(&g)).unwrap() - 1.0).abs() < 1e-15);
        let c = ScalarField::from_fn(&g, |_, _| -3.0);
        let r = Region::strip(&g, 0.5);
        let area = r.area();
        assert!((lp_norm(&c, 1.0, &r).unwrap() - 3.0 * area).abs() < 1e-14);
        assert_eq!(lp_norm(&c, f64::INFINITY, &r).unwrap(), 3.0);
        assert_eq!(lp_norm(&c, 3.0, &Region::empty(&g)).unwrap(), 0.0);
    }

    #[test]
    fn rejects_small_exponent() {
        let g = make_channel_grid(8, 5, 1.0, 1.0, Clustering::Uniform).unwrap();
        let f = ScalarField::zeros(&g);
        assert!(lp_norm(&f, 0.5, &Region::full(&g)).is_err());
        assert!(parse_exponent("0.9").is_err());
        assert_eq!(parse_exponent("inf").unwrap(), f64::INFINITY);
    }
}
