use crate::grid::MeridianGrid;
use crate::real::Real;

/// Nodal unknowns at one time level, flat arrays in grid order (`r` fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState<T> {
    pub u_r: Vec<T>,
    pub u_theta: Vec<T>,
    pub u_z: Vec<T>,
    pub p: Vec<T>,
    pub t: T,
    /// Set for raw initial data that has not been through a solver step yet.
    pub pre_stage: bool,
}

impl<T: Real> FieldState<T> {
    pub fn zeros(n: usize) -> Self {
        FieldState {
            u_r: vec![T::zero(); n],
            u_theta: vec![T::zero(); n],
            u_z: vec![T::zero(); n],
            p: vec![T::zero(); n],
            t: T::zero(),
            pre_stage: false,
        }
    }

    pub fn len(&self) -> usize {
        self.u_r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u_r.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        [&self.u_r, &self.u_theta, &self.u_z, &self.p]
            .iter()
            .all(|f| f.iter().all(|v| v.is_finite()))
    }

    /// `|v|` at node `k`.
    #[inline]
    pub fn speed(&self, k: usize) -> T {
        (self.u_r[k] * self.u_r[k] + self.u_theta[k] * self.u_theta[k] + self.u_z[k] * self.u_z[k]).sqrt()
    }

    /// Largest velocity magnitude on wall nodes; zero for any post-step state.
    pub fn max_wall_speed(&self, grid: &MeridianGrid<T>) -> T {
        let mut m = T::zero();
        for j in 0..grid.nz() {
            for i in 0..grid.nr() {
                if grid.is_wall(i, j) {
                    m = m.max(self.speed(grid.idx(i, j)));
                }
            }
        }
        m
    }

    /// Multiplies every velocity component by `c`.
    pub fn scale_velocity(&mut self, c: T) {
        for f in [&mut self.u_r, &mut self.u_theta, &mut self.u_z] {
            f.iter_mut().for_each(|v| *v = *v * c);
        }
    }
}
