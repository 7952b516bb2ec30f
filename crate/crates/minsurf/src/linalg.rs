//! Banded LU factorisation with partial pivoting.
//!
//! Row `i` keeps columns `i−kl ..= i+ku+kl`; the extra `kl` columns on the
//! right receive the fill-in produced by row interchanges.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let off = j as isize - i as isize + self.kl as isize;
        (i < self.n && j < self.n && off >= 0 && (off as usize) < self.width)
            .then(|| i * self.width + off as usize)
    }

    /// Entry (i, j); zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |k| self.data[k])
    }

    /// Sets an entry inside the declared band `−kl ≤ j−i ≤ ku`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(
            j + self.kl >= i && j <= i + self.ku,
            "entry ({i},{j}) outside the declared band"
        );
        let k = self.slot(i, j).expect("index in range");
        self.data[k] = value;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku + self.kl).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Factorises in place. Fails if a pivot column is numerically zero.
    pub fn factor(mut self) -> Result<BandLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tiny = scale * f64::EPSILON * n as f64;
        let mut pivots = vec![0usize; n];
        let mut lower = vec![0.0; n * kl.max(1)];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + ku + kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..=last_row {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > tiny) {
                return Err(Error::Numerical(format!(
                    "Newton matrix singular: pivot {best:.3e} in column {k} of {n}"
                )));
            }
            pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (self.slot(k, j).unwrap(), self.slot(p, j).unwrap());
                    self.data.swap(a, b);
                }
            }
            let pivot = self.get(k, k);
            for i in k + 1..=last_row {
                let l = self.get(i, k) / pivot;
                lower[k * kl + (i - k - 1)] = l;
                if l != 0.0 {
                    for j in k + 1..=last_col {
                        let upd = l * self.get(k, j);
                        let s = self.slot(i, j).unwrap();
                        self.data[s] -= upd;
                    }
                }
            }
        }
        Ok(BandLu {
            u: self,
            lower,
            pivots,
        })
    }
}

/// Factors P·A = L·U of a [`BandMatrix`].
#[derive(Debug, Clone)]
pub struct BandLu {
    u: BandMatrix,
    lower: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let (n, kl, ku) = (self.u.n, self.u.kl, self.u.ku);
        if b.len() != n {
            return Err(Error::Shape(format!(
                "rhs has {} entries, matrix order {n}",
                b.len()
            )));
        }
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
            let xk = x[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                x[i] -= self.lower[k * kl + (i - k - 1)] * xk;
            }
        }
        for i in (0..n).rev() {
            let hi = (i + ku + kl).min(n - 1);
            let s: f64 = (i + 1..=hi).map(|j| self.u.get(i, j) * x[j]).sum();
            x[i] = (x[i] - s) / self.u.get(i, i);
        }
        Ok(x)
    }
}
