use std::sync::Arc;

use super::grid::Grid;
use crate::error::{Error, Result};

/// A set of grid nodes, usually a wall strip `0 < x2 <= h`.
#[derive(Clone, Debug)]
pub struct Region {
    grid: Arc<Grid>,
    mask: Vec<bool>,
    strip_height: Option<f64>,
}

impl Region {
    /// Every node of the grid, wall rows included.
    pub fn full(grid: &Arc<Grid>) -> Self {
        Region {
            grid: Arc::clone(grid),
            mask: vec![true; grid.len()],
            strip_height: None,
        }
    }

    pub fn empty(grid: &Arc<Grid>) -> Self {
        Region {
            grid: Arc::clone(grid),
            mask: vec![false; grid.len()],
            strip_height: None,
        }
    }

    pub fn from_mask(grid: &Arc<Grid>, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != grid.len() {
            return Err(Error::Mismatch(format!(
                "mask has {} entries, grid has {}",
                mask.len(),
                grid.len()
            )));
        }
        Ok(Region {
            grid: Arc::clone(grid),
            mask,
            strip_height: None,
        })
    }

    /// Nodes with `0 < x2 <= h`.
    pub fn strip(grid: &Arc<Grid>, h: f64) -> Self {
        let nx = grid.nx();
        let mut mask = vec![false; grid.len()];
        for (j, &y) in grid.y_coords().iter().enumerate() {
            if y > 0.0 && y <= h {
                mask[j * nx..(j + 1) * nx].fill(true);
            }
        }
        Region {
            grid: Arc::clone(grid),
            mask,
            strip_height: Some(h.max(0.0)),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
    pub fn strip_height(&self) -> Option<f64> {
        self.strip_height
    }
    #[inline]
    pub fn contains(&self, k: usize) -> bool {
        self.mask[k]
    }
    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }
    pub fn node_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Number of wall-parallel rows with at least one selected node.
    pub fn row_count(&self) -> usize {
        self.mask
            .chunks(self.grid.nx())
            .filter(|row| row.iter().any(|&m| m))
            .count()
    }

    pub fn is_subset_of(&self, other: &Region) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    /// Quadrature area of the region.
    pub fn area(&self) -> f64 {
        let nx = self.grid.nx();
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(k, _)| self.grid.weight(k % nx, k / nx))
            .sum()
    }
}

/// The boundary strip `0 < x2 <= h`; empty when `h` lies below the first interior row.
pub fn layer_region(grid: &Arc<Grid>, h: f64) -> Region {
    Region::strip(grid, h)
}
