//! Differential operators: Fourier-spectral in `x1`, second-order finite
//! differences in `x2` (one-sided three-point stencils on the two walls).

use rustfft::num_complex::Complex64;

use super::fields::{ScalarField, VectorField};

/// Spectral `∂/∂x1`. The Nyquist bin is dropped.
pub fn d_dx(f: &ScalarField) -> ScalarField {
    let grid = f.grid();
    let nx = grid.nx();
    let mut modes = grid.rows_to_spectral(f.values());
    for row in modes.chunks_mut(nx) {
        for (m, c) in row.iter_mut().enumerate() {
            *c = if m == nx / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                *c * Complex64::new(0.0, grid.wavenumber(m))
            };
        }
    }
    ScalarField::from_values_unchecked(grid, grid.rows_from_spectral(modes))
}

/// Finite-difference `∂/∂x2` on the (possibly stretched) wall-normal grid.
pub fn d_dy(f: &ScalarField) -> ScalarField {
    let grid = f.grid();
    let nx = grid.nx();
    let vals = f.values();
    let mut out = vec![0.0; vals.len()];
    for j in 0..grid.ny() {
        let st = grid.d1_stencil(j);
        let (r0, r1, r2) = (st.start * nx, (st.start + 1) * nx, (st.start + 2) * nx);
        for i in 0..nx {
            out[j * nx + i] = st.coef[0] * vals[r0 + i] + st.coef[1] * vals[r1 + i] + st.coef[2] * vals[r2 + i];
        }
    }
    ScalarField::from_values_unchecked(grid, out)
}

/// Applies the `x2`-derivative stencil to a single wall-normal profile.
pub fn d_dy_profile(grid: &super::grid::Grid, profile: &[f64]) -> Vec<f64> {
    (0..grid.ny())
        .map(|j| grid.d1_stencil(j).apply(|r| profile[r]))
        .collect()
}

/// Scalar vorticity `∂1 u2 − ∂2 u1`.
pub fn curl2d(vel: &VectorField) -> ScalarField {
    d_dx(&vel.comp2).sub(&d_dy(&vel.comp1))
}

/// `∂1 u1 + ∂2 u2`.
pub fn divergence2d(vel: &VectorField) -> ScalarField {
    d_dx(&vel.comp1).add(&d_dy(&vel.comp2))
}

/// All four first derivatives of a vector field; `d{i}u{j} = ∂_i u_j`.
#[derive(Clone, Debug)]
pub struct VelocityGradient {
    pub d1u1: ScalarField,
    pub d2u1: ScalarField,
    pub d1u2: ScalarField,
    pub d2u2: ScalarField,
}

impl VelocityGradient {
    pub fn of(vel: &VectorField) -> Self {
        VelocityGradient {
            d1u1: d_dx(&vel.comp1),
            d2u1: d_dy(&vel.comp1),
            d1u2: d_dx(&vel.comp2),
            d2u2: d_dy(&vel.comp2),
        }
    }

    /// `∂_i u_j` with 1-based indices as written in the formulas.
    pub fn component(&self, i: usize, j: usize) -> &ScalarField {
        match (i, j) {
            (1, 1) => &self.d1u1,
            (2, 1) => &self.d2u1,
            (1, 2) => &self.d1u2,
            (2, 2) => &self.d2u2,
            _ => panic!("gradient index out of range: ({i}, {j})"),
        }
    }

    /// Pointwise Frobenius product `∇a : ∇b`.
    pub fn contract(&self, o: &VelocityGradient) -> ScalarField {
        self.d1u1
            .mul(&o.d1u1)
            .add(&self.d2u1.mul(&o.d2u1))
            .add(&self.d1u2.mul(&o.d1u2))
            .add(&self.d2u2.mul(&o.d2u2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{lp_norm, make_channel_grid, Clustering, Region};
    use std::f64::consts::PI;

    #[test]
    fn linear_shear_and_rest() {
        let g = make_channel_grid(8, 9, 2.0 * PI, 1.0, Clustering::Tanh { strength: 1.0 }).unwrap();
        let shear = VectorField::from_fn(&g, |_, y| (y, 0.0));
        let w = curl2d(&shear);
        assert!(w.values().iter().all(|v| (v + 1.0).abs() < 1e-12));
        assert!(divergence2d(&shear).values().iter().all(|v| v.abs() < 1e-12));
        let rest = VectorField::zeros(&g);
        assert!(curl2d(&rest).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn periodic_patch_test() {
        // (sin x1, -x2 cos x1) has zero divergence and is linear in x2
        let g = make_channel_grid(16, 7, 2.0 * PI, 2.0, Clustering::Uniform).unwrap();
        let u = VectorField::from_fn(&g, |x, y| (x.sin(), -y * x.cos()));
        assert!(divergence2d(&u).values().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn curl_second_order() {
        let g_fn = |y: f64| (y * 1.3).sin() * (-y).exp();
        let gp = |y: f64| (-y).exp() * (1.3 * (1.3 * y).cos() - (1.3 * y).sin());
        let mut errs = vec![];
        for ny in [33, 65, 129] {
            let g = make_channel_grid(16, ny, 2.0 * PI, 3.0, Clustering::Tanh { strength: 1.5 }).unwrap();
            let u = VectorField::from_fn(&g, |x, y| (x.sin() * g_fn(y), 0.0));
            let exact = ScalarField::from_fn(&g, |x, y| -x.sin() * gp(y));
            let e = lp_norm(&curl2d(&u).sub(&exact), 2.0, &Region::full(&g)).unwrap();
            errs.push(e);
        }
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > 1.8, "order {order}, errs {errs:?}");
        }
    }
}
