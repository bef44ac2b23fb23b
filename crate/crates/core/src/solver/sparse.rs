use crate::real::Real;
use crate::solver::band::BandMatrix;

/// Compressed sparse rows, assembled one row at a time.
#[derive(Debug, Clone, Default)]
pub struct CsrMatrix<T> {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> CsrMatrix<T> {
    pub fn new() -> Self {
        CsrMatrix {
            offsets: vec![0],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Appends a row; duplicate columns are summed.
    pub fn push_row(&mut self, entries: &mut Vec<(usize, T)>) {
        entries.sort_by_key(|e| e.0);
        let mut last: Option<usize> = None;
        for &(c, v) in entries.iter() {
            if last == Some(c) {
                let n = self.vals.len() - 1;
                self.vals[n] = self.vals[n] + v;
            } else {
                self.cols.push(c);
                self.vals.push(v);
                last = Some(c);
            }
        }
        self.offsets.push(self.cols.len());
        entries.clear();
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let (a, b) = (self.offsets[i], self.offsets[i + 1]);
        self.cols[a..b].iter().copied().zip(self.vals[a..b].iter().copied())
    }

    pub fn mul_vec(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).fold(T::zero(), |acc, (c, v)| acc + v * x[c]);
        }
    }

    /// Lower and upper bandwidths.
    pub fn bandwidths(&self) -> (usize, usize) {
        let (mut kl, mut ku) = (0, 0);
        for i in 0..self.rows() {
            for (c, _) in self.row(i) {
                if c < i {
                    kl = kl.max(i - c);
                } else {
                    ku = ku.max(c - i);
                }
            }
        }
        (kl, ku)
    }

    pub fn to_band(&self) -> BandMatrix<T> {
        let (kl, ku) = self.bandwidths();
        let mut band = BandMatrix::zeros(self.rows(), kl, ku);
        for i in 0..self.rows() {
            for (c, v) in self.row(i) {
                band.add(i, c, v);
            }
        }
        band
    }
}
