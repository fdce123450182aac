use std::sync::Arc;

use crate::error::Result;
use crate::field::{Grid, ScalarField, VectorField};
use crate::solver::{FlowState, ShearExact, Trajectory};

fn shear_state(grid: &Arc<Grid>, t: f64, nu: f64, profile: &[f64]) -> Result<FlowState> {
    let nx = grid.nx();
    let values: Vec<f64> = profile.iter().flat_map(|&u| std::iter::repeat_n(u, nx)).collect();
    let u1 = ScalarField::from_values(grid, values)?;
    FlowState::new(t, nu, VectorField::new(u1, ScalarField::zeros(grid))?)
}

/// Paired trajectories of the exact shear solution: the heat flow of the
/// initial profile and the steady Euler shear.
pub fn shear_reference(exact: &ShearExact, grid: &Arc<Grid>, times: &[f64]) -> Result<(Trajectory, Trajectory)> {
    let ys = grid.y_coords();
    let v0: Vec<f64> = ys.iter().map(|&y| exact.initial(y)).collect();
    let mut ns = Trajectory::new(grid, "shear-exact", 0.0, exact.nu());
    let mut euler = Trajectory::new(grid, "shear-steady", 0.0, 0.0);
    for &t in times {
        ns.push(shear_state(grid, t, exact.nu(), &exact.profile(t, ys)?)?)?;
        euler.push(shear_state(grid, t, 0.0, &v0)?)?;
    }
    Ok((ns, euler))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::error_series;
    use crate::field::{make_channel_grid, Clustering};
    use crate::quad;
    use crate::solver::TopBoundary;
    use std::f64::consts::PI;

    #[test]
    fn shear_error_matches_series() {
        // eigenmode data: e^{νt∂yy} sin(ky) = e^{−νk²t} sin(ky), so the error is closed form
        let (nu, ly) = (1e-2, 2.0);
        let k = 1.5 * PI / ly;
        let exact = ShearExact::new(move |y| (k * y).sin(), nu, ly, TopBoundary::StressFree).unwrap();
        let g = make_channel_grid(8, 801, 2.0 * PI, ly, Clustering::Uniform).unwrap();
        let times = [0.0, 0.5, 1.0];
        let (ns, eu) = shear_reference(&exact, &g, &times).unwrap();
        let s = error_series(&ns, &eu).unwrap();
        for (&t, &e) in times.iter().zip(&s.values) {
            let d = (-nu * k * k * t).exp() - 1.0;
            let want = 2.0 * PI * d * d * quad::integrate(|y| (k * y).sin().powi(2), 0.0, ly);
            assert!((e - want).abs() < 1e-5 * want.max(1e-12), "t={t}: {e} vs {want}");
        }
        assert_eq!(s.values[0], 0.0);
        let swapped = error_series(&eu, &ns).unwrap();
        assert_eq!(swapped.values, s.values);
    }
}
