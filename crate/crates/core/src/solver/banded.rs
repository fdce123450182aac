use std::ops::{Div, Mul, Sub};

use crate::error::{Error, Result};

/// Square band matrix with `kl` sub- and `ku` super-diagonals, factored by
/// Gaussian elimination with partial pivoting. Row `i` stores columns
/// `i-kl ..= i+kl+ku` so that pivoting fill stays inside the band.
#[derive(Clone, Debug)]
pub(crate) struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ab: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        BandMatrix {
            n,
            kl,
            ku,
            ab: vec![0.0; n * (2 * kl + ku + 1)],
        }
    }

    fn width(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        i * self.width() + (j + self.kl - i)
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "entry ({i},{j}) outside the band");
        let s = self.slot(i, j);
        self.ab[s] = v;
    }

    pub fn factor(mut self) -> Result<BandLu> {
        let (n, kl) = (self.n, self.kl);
        let reach = kl + self.ku;
        let mut piv = vec![0; n];
        let mut lower = vec![0.0; n * kl];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.ab[self.slot(k, k)].abs();
            for r in k + 1..=last {
                let v = self.ab[self.slot(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::invalid(format!("band matrix is singular at column {k}")));
            }
            piv[k] = p;
            let cols = k..=(k + reach).min(n - 1);
            if p != k {
                for j in cols.clone() {
                    let (a, b) = (self.slot(k, j), self.slot(p, j));
                    self.ab.swap(a, b);
                }
            }
            let pivot = self.ab[self.slot(k, k)];
            for r in k + 1..=last {
                let m = self.ab[self.slot(r, k)] / pivot;
                lower[k * kl + (r - k - 1)] = m;
                if m == 0.0 {
                    continue;
                }
                for j in k + 1..=(k + reach).min(n - 1) {
                    let (a, b) = (self.slot(r, j), self.slot(k, j));
                    self.ab[a] -= m * self.ab[b];
                }
            }
        }
        Ok(BandLu { m: self, piv, lower })
    }
}

#[derive(Clone, Debug)]
pub(crate) struct BandLu {
    m: BandMatrix,
    piv: Vec<usize>,
    lower: Vec<f64>,
}

impl BandLu {
    pub fn solve_in_place<T>(&self, b: &mut [T])
    where
        T: Copy + Sub<Output = T> + Mul<f64, Output = T> + Div<f64, Output = T>,
    {
        let (n, kl) = (self.m.n, self.m.kl);
        let reach = kl + self.m.ku;
        assert_eq!(b.len(), n);
        for k in 0..n {
            b.swap(k, self.piv[k]);
            let bk = b[k];
            for r in k + 1..=(k + kl).min(n - 1) {
                let m = self.lower[k * kl + (r - k - 1)];
                if m != 0.0 {
                    b[r] = b[r] - bk * m;
                }
            }
        }
        for k in (0..n).rev() {
            let mut acc = b[k];
            for j in k + 1..=(k + reach).min(n - 1) {
                acc = acc - b[j] * self.m.ab[self.m.slot(k, j)];
            }
            b[k] = acc / self.m.ab[self.m.slot(k, k)];
        }
    }
}
