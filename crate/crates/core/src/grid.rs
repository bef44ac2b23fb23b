//! Graded tensor grid on the meridian half-plane `(r, z) ∈ [0, 1] × [z_min, z_max]`.

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::real::{from_usize, Real};

/// Which axial extent the cylinder uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainKind {
    /// `-a < z < 4a`, initial velocity centre close to the lower wall.
    Offset,
    /// `-5a/2 < z < 5a/2`, initial velocity centre in the middle.
    Centered,
}

impl DomainKind {
    pub fn name(self) -> &'static str {
        match self {
            DomainKind::Offset => "offset",
            DomainKind::Centered => "centered",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainVariant {
    pub kind: DomainKind,
    pub a: f64,
}

impl DomainVariant {
    pub fn new(kind: DomainKind, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::config("a", None, format!("must be positive, got {a}")));
        }
        Ok(DomainVariant { kind, a })
    }

    /// Axial extent `(z_min, z_max)`. The radius is always 1.
    pub fn z_range(&self) -> (f64, f64) {
        match self.kind {
            DomainKind::Offset => (-self.a, 4.0 * self.a),
            DomainKind::Centered => (-2.5 * self.a, 2.5 * self.a),
        }
    }
}

/// Tensor-product grid. Node lists are strictly increasing and hit the
/// domain ends exactly; radial spacing is finest at the axis.
#[derive(Debug, Clone, PartialEq)]
pub struct MeridianGrid<T> {
    pub r: Vec<T>,
    pub z: Vec<T>,
    pub h_max: T,
    pub h_min: T,
    pub h_avg: T,
}

/// Position of a point inside a grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellLocation<T> {
    /// Cell index along r (`0..nr-1`).
    pub i: usize,
    /// Cell index along z (`0..nz-1`).
    pub j: usize,
    /// Local coordinates in `[0, 1]²`.
    pub s: T,
    pub t: T,
}

/// Builds the grid described by `config`.
pub fn build_grid<T: Real>(config: &SimConfig) -> Result<MeridianGrid<T>> {
    let variant = DomainVariant::new(config.variant, config.a)?;
    graded_grid(config.nr, config.nz, config.grading, variant)
}

/// Grid with `nr × nz` nodes; radial gaps grow by `1/grading` per cell away from the axis.
pub fn graded_grid<T: Real>(
    nr: usize,
    nz: usize,
    grading: f64,
    variant: DomainVariant,
) -> Result<MeridianGrid<T>> {
    if nr < 2 {
        return Err(Error::config("nr", None, format!("need at least 2 nodes, got {nr}")));
    }
    if nz < 2 {
        return Err(Error::config("nz", None, format!("need at least 2 nodes, got {nz}")));
    }
    if !(grading > 0.0 && grading <= 1.0) {
        return Err(Error::config("grading", None, format!("must lie in (0, 1], got {grading}")));
    }
    let gaps: Vec<f64> = (0..nr - 1).map(|k| grading.powi(-(k as i32))).collect();
    let r = cumulative(&gaps, 0.0, 1.0);
    let (z0, z1) = variant.z_range();
    let z = cumulative(&vec![1.0; nz - 1], z0, z1);
    Ok(MeridianGrid::from_nodes(
        r.into_iter().map(T::lit).collect(),
        z.into_iter().map(T::lit).collect(),
    ))
}

fn cumulative(gaps: &[f64], start: f64, end: f64) -> Vec<f64> {
    let total: f64 = gaps.iter().sum();
    let mut nodes = Vec::with_capacity(gaps.len() + 1);
    nodes.push(start);
    let mut acc = 0.0;
    for g in &gaps[..gaps.len() - 1] {
        acc += g;
        nodes.push(start + (end - start) * acc / total);
    }
    nodes.push(end);
    nodes
}

impl<T: Real> MeridianGrid<T> {
    /// Wraps explicit node lists and computes the spacing statistics.
    ///
    /// Panics if either list has fewer than two nodes or is not strictly increasing.
    pub fn from_nodes(r: Vec<T>, z: Vec<T>) -> Self {
        assert!(r.len() >= 2 && z.len() >= 2, "grid needs two nodes per direction");
        assert!(r.windows(2).all(|w| w[0] < w[1]), "radial nodes must increase");
        assert!(z.windows(2).all(|w| w[0] < w[1]), "axial nodes must increase");
        let (h_max, h_min, h_avg) = edge_stats(&r, &z);
        MeridianGrid {
            r,
            z,
            h_max,
            h_min,
            h_avg,
        }
    }

    pub fn nr(&self) -> usize {
        self.r.len()
    }

    pub fn nz(&self) -> usize {
        self.z.len()
    }

    pub fn len(&self) -> usize {
        self.r.len() * self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat node index, `r` fastest.
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.r.len() + i
    }

    pub fn z_min(&self) -> T {
        self.z[0]
    }

    pub fn z_max(&self) -> T {
        self.z[self.z.len() - 1]
    }

    pub fn r_max(&self) -> T {
        self.r[self.r.len() - 1]
    }

    pub fn contains(&self, r: T, z: T) -> bool {
        r >= self.r[0] && r <= self.r_max() && z >= self.z_min() && z <= self.z_max()
    }

    /// Whether node `(i, j)` lies on a solid wall (`r = 1` or either end plane).
    #[inline]
    pub fn is_wall(&self, i: usize, j: usize) -> bool {
        i + 1 == self.nr() || j == 0 || j + 1 == self.nz()
    }

    /// Finds the cell containing `(r, z)`. Points on the upper boundary
    /// belong to the last cell.
    pub fn locate(&self, r: T, z: T) -> Result<CellLocation<T>> {
        if !self.contains(r, z) {
            return Err(Error::OutOfDomain {
                r: r.to_f64_lossy(),
                z: z.to_f64_lossy(),
            });
        }
        let i = cell_index(&self.r, r);
        let j = cell_index(&self.z, z);
        let s = (r - self.r[i]) / (self.r[i + 1] - self.r[i]);
        let t = (z - self.z[j]) / (self.z[j + 1] - self.z[j]);
        Ok(CellLocation {
            i,
            j,
            s: clamp01(s),
            t: clamp01(t),
        })
    }

    /// Bilinear reconstruction of a nodal field at `(r, z)`.
    pub fn interpolate(&self, field: &[T], r: T, z: T) -> Result<T> {
        let loc = self.locate(r, z)?;
        Ok(self.interpolate_at(field, &loc))
    }

    #[inline]
    pub fn interpolate_at(&self, field: &[T], loc: &CellLocation<T>) -> T {
        let n = self.nr();
        let k = loc.j * n + loc.i;
        let one = T::one();
        let (s, t) = (loc.s, loc.t);
        (one - t) * ((one - s) * field[k] + s * field[k + 1])
            + t * ((one - s) * field[k + n] + s * field[k + n + 1])
    }

    /// `r`-weighted measure of the radial control volume around node `i`,
    /// `∫ r dr` over `[r_{i-1/2}, r_{i+1/2}]` clipped to `[0, 1]`.
    pub fn radial_volume(&self, i: usize) -> T {
        let lo = self.r_face_below(i);
        let hi = self.r_face_above(i);
        (hi * hi - lo * lo) * T::half()
    }

    /// Width of the axial control volume around node `j`.
    pub fn axial_width(&self, j: usize) -> T {
        let lo = if j == 0 { self.z[0] } else { (self.z[j - 1] + self.z[j]) * T::half() };
        let hi = if j + 1 == self.nz() {
            self.z[j]
        } else {
            (self.z[j] + self.z[j + 1]) * T::half()
        };
        hi - lo
    }

    pub(crate) fn r_face_below(&self, i: usize) -> T {
        if i == 0 {
            self.r[0]
        } else {
            (self.r[i - 1] + self.r[i]) * T::half()
        }
    }

    pub(crate) fn r_face_above(&self, i: usize) -> T {
        if i + 1 == self.nr() {
            self.r[i]
        } else {
            (self.r[i] + self.r[i + 1]) * T::half()
        }
    }

    /// Quadrature weight of node `(i, j)` for `2π ∫∫ f r dr dz`.
    ///
    /// Control-volume weights: exact for constants and, at the axis, equal
    /// to the `r`-average over the half cell times its width.
    pub fn weight(&self, i: usize, j: usize) -> T {
        T::two() * T::PI() * self.radial_volume(i) * self.axial_width(j)
    }

    /// All quadrature weights in flat node order.
    pub fn weights(&self) -> Vec<T> {
        let mut w = Vec::with_capacity(self.len());
        for j in 0..self.nz() {
            for i in 0..self.nr() {
                w.push(self.weight(i, j));
            }
        }
        w
    }

    /// `2π ∫∫ r dr dz` over the whole domain.
    pub fn measure(&self) -> T {
        self.weights().into_iter().fold(T::zero(), |a, b| a + b)
    }
}

/// `(h_max, h_min, h_avg)` over every cell edge in both directions.
pub fn grid_metrics<T: Real>(grid: &MeridianGrid<T>) -> (T, T, T) {
    (grid.h_max, grid.h_min, grid.h_avg)
}

fn edge_stats<T: Real>(r: &[T], z: &[T]) -> (T, T, T) {
    let dr = r.windows(2).map(|w| w[1] - w[0]);
    let dz = z.windows(2).map(|w| w[1] - w[0]);
    let mut max = T::zero();
    let mut min = T::infinity();
    for h in dr.clone().chain(dz.clone()) {
        max = max.max(h);
        min = min.min(h);
    }
    // Every radial gap appears on nz edges, every axial gap on nr edges.
    let sum_r = dr.fold(T::zero(), |a, b| a + b) * from_usize::<T>(z.len());
    let sum_z = dz.fold(T::zero(), |a, b| a + b) * from_usize::<T>(r.len());
    let count = (r.len() - 1) * z.len() + (z.len() - 1) * r.len();
    let avg = ((sum_r + sum_z) / from_usize::<T>(count)).max(min).min(max);
    (max, min, avg)
}

fn cell_index<T: Real>(nodes: &[T], x: T) -> usize {
    let above = nodes.partition_point(|&n| n <= x);
    above.saturating_sub(1).min(nodes.len() - 2)
}

fn clamp01<T: Real>(x: T) -> T {
    x.max(T::zero()).min(T::one())
}
