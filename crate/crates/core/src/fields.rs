//! Differential and integral quantities of a [`FieldState`].

use crate::grid::MeridianGrid;
use crate::real::Real;
use crate::state::FieldState;

/// Nodal vorticity in cylindrical components.
#[derive(Debug, Clone, PartialEq)]
pub struct VorticityField<T> {
    pub w_r: Vec<T>,
    pub w_theta: Vec<T>,
    pub w_z: Vec<T>,
}

impl<T: Real> VorticityField<T> {
    #[inline]
    pub fn magnitude(&self, k: usize) -> T {
        (self.w_r[k] * self.w_r[k] + self.w_theta[k] * self.w_theta[k] + self.w_z[k] * self.w_z[k]).sqrt()
    }

    pub fn max_magnitude(&self) -> T {
        (0..self.w_r.len()).fold(T::zero(), |m, k| m.max(self.magnitude(k)))
    }
}

/// Unit vorticity directions; `valid[k]` is false where `|ω|` is below the floor.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionField<T> {
    pub xi: Vec<[T; 3]>,
    pub valid: Vec<bool>,
}

/// Second-order derivative of `f` along a node list at index `i`:
/// three-point central inside, three-point one-sided at the ends.
pub(crate) fn derivative<T: Real>(x: &[T], i: usize, f: impl Fn(usize) -> T) -> T {
    let n = x.len();
    if n == 2 {
        return (f(1) - f(0)) / (x[1] - x[0]);
    }
    if i == 0 {
        let (h1, h2) = (x[1] - x[0], x[2] - x[1]);
        let c0 = -(T::two() * h1 + h2) / (h1 * (h1 + h2));
        let c1 = (h1 + h2) / (h1 * h2);
        let c2 = -h1 / (h2 * (h1 + h2));
        c0 * f(0) + c1 * f(1) + c2 * f(2)
    } else if i + 1 == n {
        let (h1, h2) = (x[n - 2] - x[n - 3], x[n - 1] - x[n - 2]);
        let c0 = h2 / (h1 * (h1 + h2));
        let c1 = -(h1 + h2) / (h1 * h2);
        let c2 = (h1 + T::two() * h2) / (h2 * (h1 + h2));
        c0 * f(n - 3) + c1 * f(n - 2) + c2 * f(n - 1)
    } else {
        let (h1, h2) = (x[i] - x[i - 1], x[i + 1] - x[i]);
        let cm = -h2 / (h1 * (h1 + h2));
        let c = (h2 - h1) / (h1 * h2);
        let cp = h1 / (h2 * (h1 + h2));
        cm * f(i - 1) + c * f(i) + cp * f(i + 1)
    }
}

fn d_dr<T: Real>(g: &MeridianGrid<T>, field: &[T], i: usize, j: usize) -> T {
    let base = g.idx(0, j);
    derivative(&g.r, i, |ii| field[base + ii])
}

fn d_dz<T: Real>(g: &MeridianGrid<T>, field: &[T], i: usize, j: usize) -> T {
    let nr = g.nr();
    derivative(&g.z, j, |jj| field[jj * nr + i])
}

/// `w_r = -∂_z u_θ`, `w_θ = ∂_z u_r - ∂_r u_z`, `w_z = (1/r)∂_r(r u_θ)`,
/// with `w_z = 2∂_r u_θ` on the axis.
pub fn vorticity<T: Real>(state: &FieldState<T>, grid: &MeridianGrid<T>) -> VorticityField<T> {
    let n = grid.len();
    let mut w = VorticityField {
        w_r: vec![T::zero(); n],
        w_theta: vec![T::zero(); n],
        w_z: vec![T::zero(); n],
    };
    let gamma: Vec<T> = (0..n).map(|k| grid.r[k % grid.nr()] * state.u_theta[k]).collect();
    for j in 0..grid.nz() {
        for i in 0..grid.nr() {
            let k = grid.idx(i, j);
            w.w_r[k] = -d_dz(grid, &state.u_theta, i, j);
            w.w_theta[k] = d_dz(grid, &state.u_r, i, j) - d_dr(grid, &state.u_z, i, j);
            w.w_z[k] = if i == 0 {
                T::two() * d_dr(grid, &state.u_theta, i, j)
            } else {
                d_dr(grid, &gamma, i, j) / grid.r[i]
            };
        }
    }
    w
}

/// `ξ = ω/|ω|` where `|ω| > floor · max|ω|`.
pub fn direction<T: Real>(w: &VorticityField<T>, floor: T) -> DirectionField<T> {
    let n = w.w_r.len();
    let cutoff = floor * w.max_magnitude();
    let mut out = DirectionField {
        xi: vec![[T::zero(); 3]; n],
        valid: vec![false; n],
    };
    for k in 0..n {
        let m = w.magnitude(k);
        if m > cutoff && m > T::zero() {
            out.xi[k] = [w.w_r[k] / m, w.w_theta[k] / m, w.w_z[k] / m];
            out.valid[k] = true;
        }
    }
    out
}

/// Nodal `(1/r)∂_r(r u_r) + ∂_z u_z`, using `2∂_r u_r + ∂_z u_z` on the axis.
pub fn divergence<T: Real>(state: &FieldState<T>, grid: &MeridianGrid<T>) -> Vec<T> {
    let mut d = vec![T::zero(); grid.len()];
    for j in 0..grid.nz() {
        for i in 0..grid.nr() {
            let k = grid.idx(i, j);
            let dr = d_dr(grid, &state.u_r, i, j);
            let radial = if i == 0 { T::two() * dr } else { dr + state.u_r[k] / grid.r[i] };
            d[k] = radial + d_dz(grid, &state.u_z, i, j);
        }
    }
    d
}

/// `r`-weighted L² norm of [`divergence`].
pub fn divergence_residual<T: Real>(state: &FieldState<T>, grid: &MeridianGrid<T>) -> T {
    let d = divergence(state, grid);
    weighted_norm(grid, &d)
}

/// `(2π ∫∫ f² r dr dz)^{1/2}` with the grid quadrature.
pub fn weighted_norm<T: Real>(grid: &MeridianGrid<T>, f: &[T]) -> T {
    let mut acc = T::zero();
    for j in 0..grid.nz() {
        for i in 0..grid.nr() {
            let v = f[grid.idx(i, j)];
            acc = acc + grid.weight(i, j) * v * v;
        }
    }
    acc.sqrt()
}

/// `½ ∫_Ω |v|²`, i.e. `π ∫∫ |v|² r dr dz`.
pub fn kinetic_energy<T: Real>(state: &FieldState<T>, grid: &MeridianGrid<T>) -> T {
    let mut acc = T::zero();
    for j in 0..grid.nz() {
        for i in 0..grid.nr() {
            let k = grid.idx(i, j);
            let s2 = state.u_r[k] * state.u_r[k] + state.u_theta[k] * state.u_theta[k] + state.u_z[k] * state.u_z[k];
            acc = acc + grid.weight(i, j) * s2;
        }
    }
    acc * T::half()
}

/// Largest `|v|` over the nodes and where it occurs. Ties go to the smallest
/// `r`, then the smallest `z`.
pub fn max_velocity<T: Real>(state: &FieldState<T>, grid: &MeridianGrid<T>) -> (T, (T, T)) {
    let mut best = (T::neg_infinity(), (T::zero(), T::zero()));
    // r varies fastest, so scan r outermost to meet ties in tie-break order
    for i in 0..grid.nr() {
        for j in 0..grid.nz() {
            let s = state.speed(grid.idx(i, j));
            if s > best.0 {
                best = (s, (grid.r[i], grid.z[j]));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{graded_grid, DomainKind, DomainVariant};
    use crate::initial::{initial_field, InitialParams};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn grid(nr: usize, nz: usize) -> MeridianGrid<f64> {
        graded_grid(nr, nz, 0.93, DomainVariant::new(DomainKind::Offset, 0.125).unwrap()).unwrap()
    }

    fn fill(g: &MeridianGrid<f64>, f: impl Fn(f64, f64) -> (f64, f64, f64)) -> FieldState<f64> {
        let mut s = FieldState::zeros(g.len());
        for j in 0..g.nz() {
            for i in 0..g.nr() {
                let k = g.idx(i, j);
                let (a, b, c) = f(g.r[i], g.z[j]);
                s.u_r[k] = a;
                s.u_theta[k] = b;
                s.u_z[k] = c;
            }
        }
        s
    }

    #[test]
    fn rigid_rotation_has_uniform_axial_vorticity() {
        let g = grid(13, 9);
        let w = vorticity(&fill(&g, |r, _| (0.0, r, 0.0)), &g);
        for k in 0..g.len() {
            assert!(w.w_r[k].abs() < 1e-12);
            assert!(w.w_theta[k].abs() < 1e-12);
            assert_relative_eq!(w.w_z[k], 2.0, epsilon = 1e-11);
        }
        let d = direction(&w, 1e-8);
        assert!(d.valid.iter().all(|&v| v));
        for x in &d.xi {
            assert_relative_eq!(x[2], 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn azimuthal_vorticity_of_parabolic_jet() {
        let g = grid(13, 9);
        let w = vorticity(&fill(&g, |r, _| (0.0, 0.0, -r * r)), &g);
        for j in 0..g.nz() {
            for i in 0..g.nr() {
                assert_relative_eq!(w.w_theta[g.idx(i, j)], 2.0 * g.r[i], epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn axis_column_uses_limit_formula() {
        let g = grid(13, 9);
        let s = fill(&g, |r, z| (0.0, r * (1.0 - r) * (1.0 + z), 0.0));
        let w = vorticity(&s, &g);
        for j in 0..g.nz() {
            let one_sided = derivative(&g.r, 0, |i| s.u_theta[g.idx(i, j)]);
            assert_eq!(w.w_z[g.idx(0, j)], 2.0 * one_sided);
        }
    }

    #[test]
    fn zero_vorticity_is_invalid() {
        let g = grid(5, 5);
        let w = vorticity(&FieldState::zeros(g.len()), &g);
        assert!(direction(&w, 1e-8).valid.iter().all(|&v| !v));
    }

    #[test]
    fn divergence_examples() {
        let g = grid(11, 13);
        assert_eq!(divergence_residual(&FieldState::zeros(g.len()), &g), 0.0);
        let s = fill(&g, |r, z| (r, 0.0, -2.0 * z));
        assert!(divergence_residual(&s, &g) < 1e-12);
        let s = fill(&g, |_, z| (0.0, 0.0, z));
        assert_relative_eq!(divergence_residual(&s, &g), g.measure().sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn energy_of_uniform_axial_flow() {
        let g = grid(21, 17);
        assert_eq!(kinetic_energy(&FieldState::zeros(g.len()), &g), 0.0);
        let s = fill(&g, |_, _| (0.0, 0.0, 1.0));
        assert_relative_eq!(kinetic_energy(&s, &g), 5.0 * std::f64::consts::PI / 16.0, epsilon = 1e-12);
        assert_relative_eq!(kinetic_energy(&s, &g), 0.98175, epsilon = 1e-5);
    }

    #[test]
    fn max_velocity_tie_break_and_bump() {
        let g = MeridianGrid::from_nodes(vec![0.0, 0.1, 0.2, 0.3, 1.0], vec![0.0, 0.1, 0.2]);
        let s = fill(&g, |r, z| {
            let bump = (-((r - 0.2).powi(2) + (z - 0.1).powi(2)) * 100.0).exp();
            (0.0, 0.0, bump)
        });
        assert_eq!(max_velocity(&s, &g).1, (0.2, 0.1));
        let s = fill(&g, |r, z| {
            let v = if (r == 0.1 || r == 0.3) && z == 0.1 { 1.0 } else { 0.0 };
            (v, 0.0, 0.0)
        });
        assert_eq!(max_velocity(&s, &g), (1.0, (0.1, 0.1)));
        let z = FieldState::zeros(g.len());
        assert_eq!(max_velocity(&z, &g), (0.0, (0.0, 0.0)));
    }

    #[test]
    fn initial_maximum_sits_next_to_origin() {
        let g = grid(64, 160);
        let s = initial_field(&InitialParams::default(), &g).unwrap();
        let (_, (r, z)) = max_velocity(&s, &g);
        let nearest = g.z.iter().cloned().min_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap();
        assert_eq!((r, z), (0.0, nearest));
    }

    #[test]
    fn gradient_fields_lose_azimuthal_vorticity_at_second_order() {
        // u = ∇ψ in the meridian plane is curl-free
        let psi_r = |r: f64, z: f64| 2.0 * r * (3.0 * z).cos() + (r * 2.0).sin();
        let psi_z = |r: f64, z: f64| -3.0 * r * r * (3.0 * z).sin();
        let errs: Vec<f64> = [17usize, 33, 65]
            .iter()
            .map(|&n| {
                let g = graded_grid(n, n, 1.0, DomainVariant::new(DomainKind::Offset, 0.125).unwrap()).unwrap();
                let w = vorticity(&fill(&g, |r, z| (psi_r(r, z), 0.0, psi_z(r, z))), &g);
                w.w_theta.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            })
            .collect();
        for pair in errs.windows(2) {
            let rate = (pair[0] / pair[1]).log2();
            assert!(rate > 1.8, "rate {rate} from {errs:?}");
        }
    }

    proptest! {
        #[test]
        fn energy_is_quadratic_and_max_is_scale_free(c in 0.01f64..10.0, seed in 0usize..100) {
            let g = grid(9, 11);
            let s = fill(&g, |r, z| ((r * 3.0 + seed as f64).sin(), (z * 7.0).cos() * r, r - z));
            let mut t = s.clone();
            t.scale_velocity(c);
            let (e0, e1) = (kinetic_energy(&s, &g), kinetic_energy(&t, &g));
            prop_assert!((e1 - c * c * e0).abs() <= 1e-12 * e1.max(1.0));
            let (m0, at0) = max_velocity(&s, &g);
            let (m1, at1) = max_velocity(&t, &g);
            prop_assert_eq!(at0, at1);
            prop_assert!((m1 - c * m0).abs() <= 1e-12 * m1.max(1.0));
        }

        #[test]
        fn directions_are_unit(seed in 0usize..200) {
            let g = grid(9, 11);
            let s = fill(&g, |r, z| ((r * 5.0 + seed as f64).sin() * z, (z * 9.0 + r).cos() * r, r * z * z));
            let d = direction(&vorticity(&s, &g), 1e-8);
            for (x, v) in d.xi.iter().zip(&d.valid) {
                if *v {
                    let n = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                    prop_assert!((n - 1.0).abs() < 1e-14);
                }
            }
        }
    }
}
