//! Observation protocol applied to a running simulation: time series of the
//! velocity maximum, turning-point detection, core axial flow, probe lines,
//! vorticity-direction oscillation and a Type-I blow-up indicator.

use crate::error::{Error, Result};
use crate::fields::{direction, kinetic_energy, max_velocity, vorticity, VorticityField};
use crate::grid::MeridianGrid;
use crate::real::Real;
use crate::state::FieldState;

/// One sample of the time series.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiagnosticsRecord<T> {
    pub t: T,
    pub max_v: T,
    pub arg_r: T,
    pub arg_z: T,
    /// Distance of the maximum point from the symmetry axis; equals `arg_r`.
    pub dist_axis: T,
    pub min_core_uz: T,
    pub max_core_uz: T,
    pub energy: T,
    pub max_w: T,
}

/// Samples `state`. Core extremes are taken over nodes with `r < r_core`.
pub fn record<T: Real>(state: &FieldState<T>, grid: &MeridianGrid<T>, r_core: T) -> DiagnosticsRecord<T> {
    let (max_v, (arg_r, arg_z)) = max_velocity(state, grid);
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for j in 0..grid.nz() {
        for (i, &r) in grid.r.iter().enumerate() {
            if r >= r_core {
                break;
            }
            let uz = state.u_z[grid.idx(i, j)];
            lo = lo.min(uz);
            hi = hi.max(uz);
        }
    }
    DiagnosticsRecord {
        t: state.t,
        max_v,
        arg_r,
        arg_z,
        dist_axis: arg_r,
        min_core_uz: lo,
        max_core_uz: hi,
        energy: kinetic_energy(state, grid),
        max_w: vorticity(state, grid).max_magnitude(),
    }
}

/// Times at which the distance of the maximum point from the axis jumps by at
/// least `jump` between consecutive records.
pub fn detect_turning_points<T: Real>(series: &[DiagnosticsRecord<T>], jump: T) -> Vec<T> {
    series
        .windows(2)
        .filter(|w| (w[1].dist_axis - w[0].dist_axis).abs() >= jump)
        .map(|w| w[1].t)
        .collect()
}

/// `(t, max_v · sqrt(t_star - t))` for every record; bounded values are
/// consistent with a Type-I rate at `t_star`.
pub fn type_one_indicator<T: Real>(series: &[DiagnosticsRecord<T>], t_star: T) -> Result<Vec<(T, T)>> {
    if let Some(r) = series.iter().find(|r| r.t >= t_star) {
        return Err(Error::Parameter(format!(
            "t_star = {t_star} must exceed every recorded time (found t = {})",
            r.t
        )));
    }
    Ok(series.iter().map(|r| (r.t, r.max_v * (t_star - r.t).sqrt())).collect())
}

/// Direction of a probe line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeAxis {
    /// Parallel to `z`; offsets are distances from the lower wall.
    ParallelZ,
    /// Parallel to `x₂`; offsets are distances from the axis point at the base height.
    ParallelX2,
}

/// `|ω|` and `ξ` in Cartesian components along a probe line.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSample<T> {
    pub base: [T; 3],
    pub direction: [T; 3],
    pub offsets: Vec<T>,
    pub points: Vec<[T; 3]>,
    pub magnitude: Vec<T>,
    pub xi: Vec<[T; 3]>,
    pub valid: Vec<bool>,
}

/// Samples the vorticity of `state` along a line through the Cartesian point `base`.
///
/// Every sample point is mapped to the meridian plane (`r = |x_h|`), the
/// cylindrical vorticity is interpolated there and rotated to Cartesian axes
/// at the point's own azimuth (azimuth 0 on the axis). `ξ` is valid where
/// `|ω|` exceeds `floor` times the global maximum of `|ω|` on the grid.
pub fn sample_line<T: Real>(
    state: &FieldState<T>,
    grid: &MeridianGrid<T>,
    base: [T; 3],
    axis: ProbeAxis,
    offsets: &[T],
    floor: T,
) -> Result<LineSample<T>> {
    if offsets.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Parameter("probe offsets must be strictly increasing".into()));
    }
    let w = vorticity(state, grid);
    let cutoff = floor * w.max_magnitude();
    let (dir, points): ([T; 3], Vec<[T; 3]>) = match axis {
        ProbeAxis::ParallelZ => (
            [T::zero(), T::zero(), T::one()],
            offsets.iter().map(|&o| [base[0], base[1], grid.z_min() + o]).collect(),
        ),
        ProbeAxis::ParallelX2 => (
            [T::zero(), T::one(), T::zero()],
            offsets.iter().map(|&o| [base[0], o, base[2]]).collect(),
        ),
    };
    let mut out = LineSample {
        base,
        direction: dir,
        offsets: offsets.to_vec(),
        points: points.clone(),
        magnitude: Vec::with_capacity(points.len()),
        xi: Vec::with_capacity(points.len()),
        valid: Vec::with_capacity(points.len()),
    };
    for (p, &o) in points.iter().zip(offsets) {
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        let loc = grid.locate(r, p[2]).map_err(|_| {
            Error::Parameter(format!("probe sample at offset {o} leaves the domain"))
        })?;
        let wr = grid.interpolate_at(&w.w_r, &loc);
        let wt = grid.interpolate_at(&w.w_theta, &loc);
        let wz = grid.interpolate_at(&w.w_z, &loc);
        let (c, s) = if r > T::zero() { (p[0] / r, p[1] / r) } else { (T::one(), T::zero()) };
        let cart = [wr * c - wt * s, wr * s + wt * c, wz];
        let m = (cart[0] * cart[0] + cart[1] * cart[1] + cart[2] * cart[2]).sqrt();
        out.magnitude.push(m);
        if m > cutoff && m > T::zero() {
            out.xi.push([cart[0] / m, cart[1] / m, cart[2] / m]);
            out.valid.push(true);
        } else {
            out.xi.push([T::zero(); 3]);
            out.valid.push(false);
        }
    }
    Ok(out)
}

/// Largest `|ξ(x) - ξ(y)|` over pairs of distinct valid nodes at most `sep`
/// apart. `None` when no such pair exists.
pub fn alignment_discontinuity<T: Real>(w: &VorticityField<T>, grid: &MeridianGrid<T>, floor: T, sep: T) -> Option<T> {
    alignment_discontinuity_in(w, grid, floor, sep, |_, _| true)
}

/// [`alignment_discontinuity`] restricted to node pairs that both satisfy `region(r, z)`.
pub fn alignment_discontinuity_in<T: Real>(
    w: &VorticityField<T>,
    grid: &MeridianGrid<T>,
    floor: T,
    sep: T,
    region: impl Fn(T, T) -> bool,
) -> Option<T> {
    let dir = direction(w, floor);
    let sep2 = sep * sep;
    let mut best: Option<T> = None;
    for j in 0..grid.nz() {
        let z = grid.z[j];
        let j_hi = grid.z.partition_point(|&zz| zz <= z + sep);
        for i in 0..grid.nr() {
            let r = grid.r[i];
            let k = grid.idx(i, j);
            if !dir.valid[k] || !region(r, z) {
                continue;
            }
            let i_lo = grid.r.partition_point(|&rr| rr < r - sep);
            let i_hi = grid.r.partition_point(|&rr| rr <= r + sep);
            // each unordered pair once: later rows, or same row to the right
            for jj in j..j_hi {
                let dz = grid.z[jj] - z;
                let start = if jj == j { i + 1 } else { i_lo };
                for ii in start..i_hi {
                    let dr = grid.r[ii] - r;
                    if dr * dr + dz * dz > sep2 {
                        continue;
                    }
                    let kk = grid.idx(ii, jj);
                    if !dir.valid[kk] || !region(grid.r[ii], grid.z[jj]) {
                        continue;
                    }
                    let (a, b) = (dir.xi[k], dir.xi[kk]);
                    let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
                    best = Some(best.map_or(d, |m: T| m.max(d)));
                }
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

    fn rec(t: f64, dist: f64, max_v: f64) -> DiagnosticsRecord<f64> {
        DiagnosticsRecord {
            t,
            max_v,
            arg_r: dist,
            dist_axis: dist,
            ..Default::default()
        }
    }

    fn offset_grid(nr: usize, nz: usize) -> MeridianGrid<f64> {
        graded_grid(nr, nz, 0.95, DomainVariant::new(DomainKind::Offset, 0.125).unwrap()).unwrap()
    }

    #[test]
    fn zero_state_record() {
        let g = offset_grid(8, 9);
        let r = record(&FieldState::zeros(g.len()), &g, 0.1);
        assert_eq!((r.max_v, r.dist_axis, r.energy, r.max_w), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(r.arg_r, r.dist_axis);
    }

    #[test]
    fn uniform_axial_core_flow() {
        let g = offset_grid(8, 9);
        let mut s = FieldState::zeros(g.len());
        s.u_z.fill(1.0);
        let r = record(&s, &g, 0.1);
        assert_eq!((r.min_core_uz, r.max_core_uz), (1.0, 1.0));
    }

    #[test]
    fn initial_record_has_positive_core_flow() {
        let g = offset_grid(32, 40);
        let s = initial_field(&InitialParams::default(), &g).unwrap();
        let r = record(&s, &g, 0.1);
        assert!(r.min_core_uz > 0.0);
        assert_eq!(r.arg_r, 0.0);
    }

    #[test]
    fn turning_points() {
        let flat: Vec<_> = (0..10).map(|k| rec(k as f64 * 0.05, 0.05, 1.0)).collect();
        assert!(detect_turning_points(&flat, 0.25).is_empty());
        let step: Vec<_> = (0..10)
            .map(|k| {
                let t = k as f64 * 0.05;
                rec(t, if t < 0.349 { 0.05 } else { 0.6 }, 1.0)
            })
            .collect();
        let tp = detect_turning_points(&step, 0.3);
        assert_eq!(tp.len(), 1);
        assert_relative_eq!(tp[0], 0.35, epsilon = 1e-12);
        assert!(detect_turning_points(&step[..1], 0.3).is_empty());
        assert!(detect_turning_points::<f64>(&[], 0.3).is_empty());
    }

    #[test]
    fn type_one_indicator_values() {
        let series: Vec<_> = (0..5).map(|k| rec(k as f64 * 0.1, 0.0, 2.0)).collect();
        let ind = type_one_indicator(&series, 1.0).unwrap();
        for (k, (t, v)) in ind.iter().enumerate() {
            assert_relative_eq!(*v, 2.0 * (1.0 - k as f64 * 0.1).sqrt(), epsilon = 1e-14);
            assert_eq!(*t, k as f64 * 0.1);
        }
        assert!(ind.windows(2).all(|w| w[1].1 < w[0].1));
        let zeros: Vec<_> = (0..3).map(|k| rec(k as f64, 0.0, 0.0)).collect();
        assert!(type_one_indicator(&zeros, 5.0).unwrap().iter().all(|p| p.1 == 0.0));
        assert!(type_one_indicator(&series, 0.4).is_err());
    }

    #[test]
    fn probe_line_of_rigid_rotation() {
        let g = offset_grid(20, 30);
        let mut s = FieldState::zeros(g.len());
        for j in 0..g.nz() {
            for i in 0..g.nr() {
                s.u_theta[g.idx(i, j)] = g.r[i];
            }
        }
        let offsets: Vec<f64> = (0..10).map(|k| k as f64 * 0.05).collect();
        let line = sample_line(&s, &g, [0.0, 0.05, -0.125], ProbeAxis::ParallelZ, &offsets, 1e-8).unwrap();
        assert_relative_eq!(line.points[0][2], -0.125);
        for (x, v) in line.xi.iter().zip(&line.valid) {
            assert!(*v);
            assert!(x[0].abs() < 1e-10 && x[1].abs() < 1e-10);
            assert_relative_eq!(x[2], 1.0, epsilon = 1e-12);
        }
        let line = sample_line(&s, &g, [0.0, 0.05, -0.125], ProbeAxis::ParallelX2, &offsets, 1e-8).unwrap();
        assert!(line.valid.iter().all(|&v| v));
    }

    #[test]
    fn probe_base_maps_to_meridian_point() {
        let g = offset_grid(20, 30);
        let mut s = FieldState::zeros(g.len());
        // w_theta = 2r from u_z = -r²
        for j in 0..g.nz() {
            for i in 0..g.nr() {
                s.u_z[g.idx(i, j)] = -g.r[i] * g.r[i];
            }
        }
        let line = sample_line(&s, &g, [0.0, 0.05, -0.125], ProbeAxis::ParallelZ, &[0.0], 0.0).unwrap();
        // azimuthal direction at azimuth 90° is -x₁
        assert_relative_eq!(line.magnitude[0], 0.1, epsilon = 1e-3);
        assert_relative_eq!(line.xi[0][0], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn probe_errors_and_zero_field() {
        let g = offset_grid(10, 10);
        let s = FieldState::zeros(g.len());
        let line = sample_line(&s, &g, [0.0, 0.05, -0.125], ProbeAxis::ParallelZ, &[0.0, 0.1], 1e-8).unwrap();
        assert!(line.valid.iter().all(|&v| !v));
        let err = sample_line(&s, &g, [0.0, 0.05, -0.125], ProbeAxis::ParallelZ, &[0.0, 0.7], 1e-8).unwrap_err();
        assert!(err.to_string().contains("0.7"));
        assert!(sample_line(&s, &g, [0.0, 0.05, -0.125], ProbeAxis::ParallelZ, &[0.1, 0.1], 1e-8).is_err());
    }

    fn field_of(g: &MeridianGrid<f64>, f: impl Fn(usize, usize) -> [f64; 3]) -> VorticityField<f64> {
        let mut w = VorticityField {
            w_r: vec![0.0; g.len()],
            w_theta: vec![0.0; g.len()],
            w_z: vec![0.0; g.len()],
        };
        for j in 0..g.nz() {
            for i in 0..g.nr() {
                let k = g.idx(i, j);
                let v = f(i, j);
                w.w_r[k] = v[0];
                w.w_theta[k] = v[1];
                w.w_z[k] = v[2];
            }
        }
        w
    }

    #[test]
    fn alignment_measure_examples() {
        let g = offset_grid(10, 12);
        let uniform = field_of(&g, |_, _| [0.0, 1.0, 1.0]);
        assert_eq!(alignment_discontinuity(&uniform, &g, 1e-8, 0.1), Some(0.0));
        let flip = field_of(&g, |i, j| match (i, j) {
            (3, 4) => [0.0, 0.0, 1.0],
            (4, 4) => [0.0, 0.0, -1.0],
            _ => [0.0; 3],
        });
        let sep = g.r[4] - g.r[3];
        assert_eq!(alignment_discontinuity(&flip, &g, 1e-8, sep), Some(2.0));
        let lonely = field_of(&g, |i, j| if (i, j) == (3, 4) { [1.0, 0.0, 0.0] } else { [0.0; 3] });
        assert_eq!(alignment_discontinuity(&lonely, &g, 1e-8, 0.2), None);
    }

    proptest! {
        #[test]
        fn turning_points_shift_with_time(shift in -5.0f64..5.0, jump in 0.05f64..0.5) {
            let series: Vec<_> = (0..30).map(|k| rec(k as f64 * 0.05, ((k * 37) % 11) as f64 / 11.0, 1.0)).collect();
            let moved: Vec<_> = series.iter().map(|r| DiagnosticsRecord { t: r.t + shift, ..*r }).collect();
            let a = detect_turning_points(&series, jump);
            let b = detect_turning_points(&moved, jump);
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x + shift - y).abs() < 1e-12);
            }
        }

        #[test]
        fn alignment_is_invariant_under_positive_rescaling(seed in 0usize..500, c0 in 0.5f64..3.0) {
            let g = offset_grid(9, 11);
            let w = field_of(&g, |i, j| {
                let s = (i * 31 + j * 17 + seed) as f64;
                [s.sin(), (1.3 * s).cos(), (0.7 * s).sin() + 0.1]
            });
            let scaled = field_of(&g, |i, j| {
                let k = g.idx(i, j);
                let c = c0 * (1.0 + 0.3 * ((i + 2 * j) as f64).sin().abs());
                [w.w_r[k] * c, w.w_theta[k] * c, w.w_z[k] * c]
            });
            // floor 0 keeps validity unchanged under positive rescaling
            let a = alignment_discontinuity(&w, &g, 0.0, 0.15).unwrap();
            let b = alignment_discontinuity(&scaled, &g, 0.0, 0.15).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((0.0..=2.0 + 1e-12).contains(&a));
        }
    }
}
