//! Banded LU factorization with partial pivoting.
//!
//! The step matrices only change when the grid or time step changes, so each
//! is factored once and the factors are reused for every right-hand side.

use crate::error::{Error, Result};
use crate::real::Real;

/// Square matrix with `kl` sub- and `ku` super-diagonals.
///
/// Row `i` keeps columns `i - kl ..= i + kl + ku`; the extra `kl` columns
/// hold fill-in produced by row interchanges.
#[derive(Debug, Clone)]
pub struct BandMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Real> BandMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            width,
            data: vec![T::zero(); n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.kl + self.ku, "({i},{j}) outside band");
        i * self.width + (j + self.kl - i)
    }

    /// Adds `v` to entry `(i, j)`. Panics (debug) outside the band.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        assert!(j + self.kl >= i && j <= i + self.ku, "entry ({i},{j}) outside band");
        let s = self.slot(i, j);
        self.data[s] = self.data[s] + v;
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if j + self.kl < i || j > i + self.ku {
            T::zero()
        } else {
            self.data[self.slot(i, j)]
        }
    }

    /// Clears row `i`.
    pub fn clear_row(&mut self, i: usize) {
        let start = i * self.width;
        self.data[start..start + self.width].fill(T::zero());
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            let row = &self.data[i * self.width..(i + 1) * self.width];
            let mut acc = T::zero();
            for j in lo..=hi {
                acc = acc + row[j + self.kl - i] * x[j];
            }
            *yi = acc;
        }
    }

    /// Factors `self` in place.
    pub fn factor(self) -> Result<BandLu<T>> {
        let BandMatrix {
            n,
            kl,
            ku,
            width,
            mut data,
        } = self;
        let mut pivots = vec![0usize; n];
        let mut mult = vec![T::zero(); n * kl];
        let span = kl + ku; // U bandwidth after pivoting
        for col in 0..n {
            let last = (col + kl).min(n - 1);
            // pivot search in column `col`
            let mut p = col;
            let mut best = T::zero();
            for r in col..=last {
                let v = data[r * width + (col + kl - r)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if !(best > T::zero()) || !best.is_finite() {
                return Err(Error::Singular { pivot: col });
            }
            pivots[col] = p;
            let cmax = (col + span).min(n - 1);
            if p != col {
                for c in col..=cmax {
                    let a = col * width + (c + kl - col);
                    let b = p * width + (c + kl - p);
                    data.swap(a, b);
                }
            }
            let piv = data[col * width + kl];
            let (head, tail) = data.split_at_mut((col + 1) * width);
            let prow = &head[col * width + kl..col * width + kl + (cmax - col) + 1];
            for r in col + 1..=last {
                let off = r - col - 1;
                let row = &mut tail[off * width..(off + 1) * width];
                let base = kl - (r - col); // slot of column `col` within row r
                let m = row[base] / piv;
                mult[col * kl + (r - col - 1)] = m;
                row[base] = T::zero();
                if m != T::zero() {
                    for (k, &u) in prow.iter().enumerate().skip(1) {
                        row[base + k] = row[base + k] - m * u;
                    }
                }
            }
        }
        Ok(BandLu {
            n,
            kl,
            width,
            span,
            data,
            mult,
            pivots,
        })
    }
}

/// LU factors of a [`BandMatrix`].
#[derive(Debug, Clone)]
pub struct BandLu<T> {
    n: usize,
    kl: usize,
    width: usize,
    span: usize,
    data: Vec<T>,
    mult: Vec<T>,
    pivots: Vec<usize>,
}

impl<T: Real> BandLu<T> {
    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [T]) {
        let (n, kl) = (self.n, self.kl);
        for col in 0..n {
            let p = self.pivots[col];
            if p != col {
                b.swap(col, p);
            }
            let bc = b[col];
            if bc != T::zero() {
                let last = (col + kl).min(n - 1);
                for r in col + 1..=last {
                    b[r] = b[r] - self.mult[col * kl + (r - col - 1)] * bc;
                }
            }
        }
        for i in (0..n).rev() {
            let row = &self.data[i * self.width + kl..];
            let hi = (i + self.span).min(n - 1);
            let mut acc = b[i];
            for j in i + 1..=hi {
                acc = acc - row[j - i] * b[j];
            }
            b[i] = acc / row[0];
        }
    }
}
