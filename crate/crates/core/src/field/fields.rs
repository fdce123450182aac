use std::sync::Arc;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Scalar field sampled on every node of a [`Grid`].
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        ScalarField {
            grid: Arc::clone(grid),
            values: vec![0.0; grid.len()],
        }
    }

    /// Wraps raw values; rejects wrong lengths and non-finite entries.
    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Mismatch(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite value at node {k}")));
        }
        Ok(ScalarField {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub(crate) fn from_values_unchecked(grid: &Arc<Grid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField {
            grid: Arc::clone(grid),
            values,
        }
    }

    /// Samples `f(x1, x2)` at every node.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let (nx, ny) = (grid.nx(), grid.ny());
        let y = grid.y_coords();
        let mut values = Vec::with_capacity(nx * ny);
        for &yj in y.iter().take(ny) {
            for i in 0..nx {
                values.push(f(grid.x_coord(i), yj));
            }
        }
        ScalarField {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }
    /// Values along wall-parallel row `j`.
    pub fn row(&self, j: usize) -> &[f64] {
        let nx = self.grid.nx();
        &self.values[j * nx..(j + 1) * nx]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_values_unchecked(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert!(Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid);
        Self::from_values_unchecked(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn add(&self, other: &ScalarField) -> Self {
        self.zip_with(other, |a, b| a + b)
    }
    pub fn sub(&self, other: &ScalarField) -> Self {
        self.zip_with(other, |a, b| a - b)
    }
    pub fn mul(&self, other: &ScalarField) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    /// Quadrature of the field over the whole channel.
    pub fn integral(&self) -> f64 {
        let nx = self.grid.nx();
        let wy = self.grid.y_weights();
        self.values
            .chunks(nx)
            .zip(wy)
            .map(|(row, &w)| w * row.iter().sum::<f64>())
            .sum::<f64>()
            * self.grid.dx()
    }
}

/// Two-component vector field on a [`Grid`].
#[derive(Clone, Debug)]
pub struct VectorField {
    pub comp1: ScalarField,
    pub comp2: ScalarField,
}

impl VectorField {
    pub fn new(comp1: ScalarField, comp2: ScalarField) -> Result<Self> {
        if *comp1.grid() != *comp2.grid() {
            return Err(Error::Mismatch("vector components live on different grids".into()));
        }
        Ok(VectorField { comp1, comp2 })
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        VectorField {
            comp1: ScalarField::zeros(grid),
            comp2: ScalarField::zeros(grid),
        }
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        VectorField {
            comp1: ScalarField::from_fn(grid, |x, y| f(x, y).0),
            comp2: ScalarField::from_fn(grid, |x, y| f(x, y).1),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.comp1.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.comp1.is_finite() && self.comp2.is_finite()
    }

    pub fn add(&self, o: &VectorField) -> Self {
        VectorField {
            comp1: self.comp1.add(&o.comp1),
            comp2: self.comp2.add(&o.comp2),
        }
    }
    pub fn sub(&self, o: &VectorField) -> Self {
        VectorField {
            comp1: self.comp1.sub(&o.comp1),
            comp2: self.comp2.sub(&o.comp2),
        }
    }
    pub fn scale(&self, c: f64) -> Self {
        VectorField {
            comp1: self.comp1.scale(c),
            comp2: self.comp2.scale(c),
        }
    }

    /// Pointwise `a · b`.
    pub fn dot(&self, o: &VectorField) -> ScalarField {
        self.comp1.mul(&o.comp1).add(&self.comp2.mul(&o.comp2))
    }

    /// `‖u‖²_{L²}` over the channel.
    pub fn energy(&self) -> f64 {
        self.dot(self).integral()
    }
}
