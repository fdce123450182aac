//! `ILIM1` binary velocity snapshots.
//!
//! Layout (all little-endian): 8-byte magic `b"ILIM1\0\0\0"`, `u64 nx`, `u64 ny`,
//! `f64 Lx`, `f64 Ly`, `f64 t`, `f64 nu`, then `u1` and `u2` as `nx * ny` f64
//! each in row-major `[i][j]` order (`x1` index outermost).

use std::path::Path;
use std::sync::Arc;

use super::fields::{ScalarField, VectorField};
use super::grid::Grid;
use crate::error::{Error, Result};

pub const SNAPSHOT_MAGIC: [u8; 8] = *b"ILIM1\0\0\0";
const HEADER_LEN: usize = 8 + 2 * 8 + 4 * 8;

/// Raw snapshot contents, independent of any grid object.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub nx: u64,
    pub ny: u64,
    pub lx: f64,
    pub ly: f64,
    pub t: f64,
    pub nu: f64,
    /// `[i][j]`-ordered samples.
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

impl Snapshot {
    pub fn from_velocity(vel: &VectorField, t: f64, nu: f64) -> Self {
        let g = vel.grid();
        Snapshot {
            nx: g.nx() as u64,
            ny: g.ny() as u64,
            lx: g.period(),
            ly: g.height(),
            t,
            nu,
            u1: to_ij(g, vel.comp1.values()),
            u2: to_ij(g, vel.comp2.values()),
        }
    }

    /// Rebuilds the velocity on `grid`, which must match the header.
    pub fn to_velocity(&self, grid: &Arc<Grid>) -> Result<VectorField> {
        if self.nx as usize != grid.nx()
            || self.ny as usize != grid.ny()
            || self.lx != grid.period()
            || self.ly != grid.height()
        {
            return Err(Error::Mismatch(format!(
                "snapshot is {}x{} on {}x{}, grid is {}x{} on {}x{}",
                self.nx,
                self.ny,
                self.lx,
                self.ly,
                grid.nx(),
                grid.ny(),
                grid.period(),
                grid.height()
            )));
        }
        VectorField::new(
            ScalarField::from_values(grid, from_ij(grid, &self.u1))?,
            ScalarField::from_values(grid, from_ij(grid, &self.u2))?,
        )
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 16 * self.u1.len());
        out.extend_from_slice(&SNAPSHOT_MAGIC);
        out.extend_from_slice(&self.nx.to_le_bytes());
        out.extend_from_slice(&self.ny.to_le_bytes());
        for v in [self.lx, self.ly, self.t, self.nu] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in self.u1.iter().chain(&self.u2) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN || bytes[..8] != SNAPSHOT_MAGIC {
            return Err(Error::Format("missing ILIM1 magic".into()));
        }
        let word = |k: usize| -> [u8; 8] { bytes[k..k + 8].try_into().expect("8-byte slice") };
        let nx = u64::from_le_bytes(word(8));
        let ny = u64::from_le_bytes(word(16));
        let f = |k: usize| f64::from_le_bytes(word(k));
        let (lx, ly, t, nu) = (f(24), f(32), f(40), f(48));
        let n = nx
            .checked_mul(ny)
            .and_then(|n| usize::try_from(n).ok())
            .ok_or_else(|| Error::Format("snapshot dimensions overflow".into()))?;
        let expected = n
            .checked_mul(16)
            .and_then(|b| b.checked_add(HEADER_LEN))
            .ok_or_else(|| Error::Format("snapshot dimensions overflow".into()))?;
        if bytes.len() != expected {
            return Err(Error::Format(format!(
                "snapshot length {} does not match {}x{} header ({} bytes expected)",
                bytes.len(),
                nx,
                ny,
                expected
            )));
        }
        let read = |start: usize| -> Vec<f64> {
            (0..n).map(|k| f(start + 8 * k)).collect()
        };
        Ok(Snapshot {
            nx,
            ny,
            lx,
            ly,
            t,
            nu,
            u1: read(HEADER_LEN),
            u2: read(HEADER_LEN + 8 * n),
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.encode()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::decode(&bytes)
    }
}

fn to_ij(g: &Grid, vals: &[f64]) -> Vec<f64> {
    let (nx, ny) = (g.nx(), g.ny());
    let mut out = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            out.push(vals[j * nx + i]);
        }
    }
    out
}

fn from_ij(g: &Grid, vals: &[f64]) -> Vec<f64> {
    let (nx, ny) = (g.nx(), g.ny());
    let mut out = vec![0.0; nx * ny];
    for i in 0..nx {
        for j in 0..ny {
            out[j * nx + i] = vals[i * ny + j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_channel_grid, Clustering};
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let g = make_channel_grid(4, 3, 2.0, 1.0, Clustering::Uniform).unwrap();
        let v = VectorField::from_fn(&g, |x, y| (x + 10.0 * y, -y));
        let s = Snapshot::from_velocity(&v, 0.5, 1e-3);
        let b = s.encode();
        assert_eq!(&b[..8], b"ILIM1\0\0\0");
        assert_eq!(u64::from_le_bytes(b[8..16].try_into().unwrap()), 4);
        assert_eq!(u64::from_le_bytes(b[16..24].try_into().unwrap()), 3);
        assert_eq!(b.len(), 56 + 16 * 12);
        // u1[i=1][j=2] is the 6th entry of the first array
        let k = 56 + 8 * (3 + 2);
        assert_eq!(f64::from_le_bytes(b[k..k + 8].try_into().unwrap()), 0.5 + 10.0);
        let back = Snapshot::decode(&b).unwrap().to_velocity(&g).unwrap();
        assert_eq!(back.comp1.values(), v.comp1.values());
    }

    #[test]
    fn rejects_truncated() {
        assert!(Snapshot::decode(b"ILIM0\0\0\0").is_err());
        let g = make_channel_grid(4, 3, 2.0, 1.0, Clustering::Uniform).unwrap();
        let mut b = Snapshot::from_velocity(&VectorField::zeros(&g), 0.0, 0.0).encode();
        b.pop();
        assert!(Snapshot::decode(&b).is_err());
    }

    proptest! {
        #[test]
        fn bit_exact_round_trip(vals in proptest::collection::vec(any::<f64>(), 24), t in any::<f64>(), nu in any::<f64>()) {
            let s = Snapshot { nx: 4, ny: 3, lx: 1.5, ly: 0.25, t, nu, u1: vals[..12].to_vec(), u2: vals[12..].to_vec() };
            let d = Snapshot::decode(&s.encode()).unwrap();
            prop_assert_eq!(d.encode(), s.encode());
            prop_assert_eq!(d.t.to_bits(), t.to_bits());
        }
    }
}
