//! Manufactured solution, discrete error norms and the refinement study.
//!
//! The manufactured velocity comes from the stream function
//! `ψ = r²(1-r²)² q(z) s(t)` with `u_r = -∂_zψ/r`, `u_z = ∂_rψ/r`, plus the
//! swirl `u_θ = r(1-r²) q(z) s(t)`. `q` has double roots at both ends of the
//! cylinder, so the field satisfies no-slip there; the factor `(1-r²)` keeps
//! it smooth across the axis as a three-dimensional field.

use std::f64::consts::PI;

use crate::config::HRule;
use crate::error::{Error, Result};
use crate::grid::MeridianGrid;
use crate::real::Real;
use crate::solver::{Forcing, SolverSettings, Stepper};
use crate::state::FieldState;

/// Dense polynomial, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
struct Poly(Vec<f64>);

impl Poly {
    fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    fn deriv(&self) -> Poly {
        Poly(self.0.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    fn mul(&self, o: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + o.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    /// Division by `x`; the constant term must vanish.
    fn div_x(&self) -> Poly {
        debug_assert!(self.0[0].abs() < 1e-14);
        Poly(self.0[1..].to_vec())
    }

    fn shift_x(&self) -> Poly {
        let mut c = vec![0.0];
        c.extend_from_slice(&self.0);
        Poly(c)
    }
}

/// Closed-form axisymmetric flow with swirl and the body force that makes it
/// an exact solution of the momentum equations at Reynolds number `re`.
#[derive(Debug, Clone)]
pub struct ManufacturedCase {
    pub re: f64,
    pub z0: f64,
    pub z1: f64,
    // radial profiles: u_r ∝ a, u_z ∝ b, u_θ ∝ c
    a: [Poly; 3],
    b: [Poly; 3],
    c: [Poly; 3],
    // (1/r) d/dr (r a) and (1/r) d/dr (r c), differentiated once more
    la: Poly,
    lc: Poly,
    lb: Poly,
    c_over_r: Poly,
    q: [Poly; 4],
}

/// The fixed manufactured case on `r ∈ [0, 1]`, `z ∈ [-1/2, 1/2]`.
pub fn manufactured_case(re: f64) -> ManufacturedCase {
    ManufacturedCase::new(re, -0.5, 0.5)
}

impl ManufacturedCase {
    pub fn new(re: f64, z0: f64, z1: f64) -> Self {
        assert!(re > 0.0 && z1 > z0);
        let one_minus_r2 = Poly(vec![1.0, 0.0, -1.0]);
        let sq = one_minus_r2.mul(&one_minus_r2);
        // ψ = r² (1-r²)² => u_r = -r (1-r²)² q', u_z = 2 (1-r²)(1-3r²) q
        let a0 = Poly(sq.0.iter().map(|v| -v).collect()).shift_x();
        let b0 = Poly(vec![2.0, 0.0, -2.0]).mul(&Poly(vec![1.0, 0.0, -3.0]));
        let c0 = one_minus_r2.shift_x();
        let d3 = |p: &Poly| [p.clone(), p.deriv(), p.deriv().deriv()];
        let vector_laplacian = |p: &Poly| p.shift_x().deriv().div_x().deriv();
        let la = vector_laplacian(&a0);
        let lc = vector_laplacian(&c0);
        let lb = b0.deriv().shift_x().deriv().div_x();
        let half = 0.5 * (z1 - z0);
        // q = ((z - z0)(z1 - z) / half²)²
        let base = Poly(vec![-z0 * z1, z0 + z1, -1.0]);
        let base = Poly(base.0.iter().map(|v| v / (half * half)).collect());
        let q0 = base.mul(&base);
        let q1 = q0.deriv();
        let q2 = q1.deriv();
        let q3 = q2.deriv();
        ManufacturedCase {
            re,
            z0,
            z1,
            c_over_r: c0.div_x(),
            a: d3(&a0),
            b: d3(&b0),
            c: d3(&c0),
            la,
            lc,
            lb,
            q: [q0, q1, q2, q3],
        }
    }

    fn s(t: f64) -> (f64, f64) {
        (1.0 + 0.5 * (2.0 * t).sin(), (2.0 * t).cos())
    }

    /// Normalised axial coordinate in `[0, 1]`.
    fn zeta(&self, z: f64) -> f64 {
        (z - self.z0) / (self.z1 - self.z0)
    }

    /// `(u_r, u_θ, u_z)`.
    pub fn velocity(&self, r: f64, z: f64, t: f64) -> [f64; 3] {
        let (s, _) = Self::s(t);
        let (q, dq) = (self.q[0].eval(z), self.q[1].eval(z));
        [self.a[0].eval(r) * dq * s, self.c[0].eval(r) * q * s, self.b[0].eval(r) * q * s]
    }

    pub fn pressure(&self, r: f64, z: f64, t: f64) -> f64 {
        (PI * r).cos() * (PI * self.zeta(z)).cos() * Self::s(t).0
    }

    /// `(f_r, f_θ, f_z)` balancing the momentum equations.
    pub fn forcing(&self, r: f64, z: f64, t: f64) -> [f64; 3] {
        let nu = 1.0 / self.re;
        let (s, ds) = Self::s(t);
        let q: Vec<f64> = self.q.iter().map(|p| p.eval(z)).collect();
        let [a, da, _] = self.a.clone().map(|p| p.eval(r));
        let [b, db, _] = self.b.clone().map(|p| p.eval(r));
        let [c, dc, _] = self.c.clone().map(|p| p.eval(r));
        let cr = self.c_over_r.eval(r);

        let ur = a * q[1] * s;
        let ut = c * q[0] * s;
        let uz = b * q[0] * s;

        let ur_t = a * q[1] * ds;
        let ur_r = da * q[1] * s;
        let ur_z = a * q[2] * s;
        let visc_r = (self.la.eval(r) * q[1] + a * q[3]) * s;

        let ut_t = c * q[0] * ds;
        let ut_r = dc * q[0] * s;
        let ut_z = c * q[1] * s;
        let visc_t = (self.lc.eval(r) * q[0] + c * q[2]) * s;

        let uz_t = b * q[0] * ds;
        let uz_r = db * q[0] * s;
        let uz_z = b * q[1] * s;
        let visc_z = (self.lb.eval(r) * q[0] + b * q[2]) * s;

        let l = self.z1 - self.z0;
        let zeta = self.zeta(z);
        let p_r = -PI * (PI * r).sin() * (PI * zeta).cos() * s;
        let p_z = -(PI / l) * (PI * r).cos() * (PI * zeta).sin() * s;

        [
            ur_t + ur * ur_r + uz * ur_z - ut * cr * q[0] * s + p_r - nu * visc_r,
            ut_t + ur * ut_r + uz * ut_z + ur * cr * q[0] * s - nu * visc_t,
            uz_t + ur * uz_r + uz * uz_z + p_z - nu * visc_z,
        ]
    }

    /// Nodal samples at time `t`; pressure is shifted to zero weighted mean.
    pub fn sample<T: Real>(&self, grid: &MeridianGrid<T>, t: f64) -> FieldState<T> {
        let mut st = FieldState::zeros(grid.len());
        st.t = T::lit(t);
        for (j, &z) in grid.z.iter().enumerate() {
            for (i, &r) in grid.r.iter().enumerate() {
                let k = grid.idx(i, j);
                let (r, z) = (r.to_f64_lossy(), z.to_f64_lossy());
                let v = self.velocity(r, z, t);
                st.u_r[k] = T::lit(v[0]);
                st.u_theta[k] = T::lit(v[1]);
                st.u_z[k] = T::lit(v[2]);
                st.p[k] = T::lit(self.pressure(r, z, t));
            }
        }
        remove_mean(grid, &mut st.p);
        st
    }
}

impl<T: Real> Forcing<T> for ManufacturedCase {
    fn eval(&self, r: T, z: T, t: T) -> [T; 3] {
        self.forcing(r.to_f64_lossy(), z.to_f64_lossy(), t.to_f64_lossy()).map(T::lit)
    }
}

fn remove_mean<T: Real>(grid: &MeridianGrid<T>, p: &mut [T]) {
    let w = grid.weights();
    let total = w.iter().fold(T::zero(), |a, &b| a + b);
    let mean = p.iter().zip(&w).fold(T::zero(), |a, (&x, &y)| a + x * y) / total;
    p.iter_mut().for_each(|v| *v = *v - mean);
}

/// Discrete error norms of a velocity/pressure pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    /// `r`-weighted L² norm of the velocity error.
    pub l2: f64,
    /// `r`-weighted H¹ seminorm of the velocity error, including the
    /// `(e_r² + e_θ²)/r²` terms of the three-dimensional gradient.
    pub h1: f64,
    /// L² norm of the pressure error after removing both weighted means.
    pub p_l2: f64,
}

/// Norms of `a - b` on `grid`.
pub fn error_norms<T: Real>(a: &FieldState<T>, b: &FieldState<T>, grid: &MeridianGrid<T>) -> ErrorNorms {
    let n = grid.len();
    assert!(a.len() == n && b.len() == n, "states do not match grid");
    let f = |x: T| x.to_f64_lossy();
    let diff = |x: &[T], y: &[T]| x.iter().zip(y).map(|(&p, &q)| f(p) - f(q)).collect::<Vec<f64>>();
    let e = [diff(&a.u_r, &b.u_r), diff(&a.u_theta, &b.u_theta), diff(&a.u_z, &b.u_z)];
    let w: Vec<f64> = grid.weights().into_iter().map(f).collect();

    let l2 = (0..n).map(|k| w[k] * e.iter().map(|c| c[k] * c[k]).sum::<f64>()).sum::<f64>().sqrt();

    let r: Vec<f64> = grid.r.iter().map(|&x| f(x)).collect();
    let z: Vec<f64> = grid.z.iter().map(|&x| f(x)).collect();
    let mut h1 = 0.0;
    for j in 0..grid.nz() - 1 {
        let dz = z[j + 1] - z[j];
        for i in 0..grid.nr() - 1 {
            let dr = r[i + 1] - r[i];
            let rc = 0.5 * (r[i] + r[i + 1]);
            let ks = [grid.idx(i, j), grid.idx(i + 1, j), grid.idx(i, j + 1), grid.idx(i + 1, j + 1)];
            let mut g2 = 0.0;
            for (c, comp) in e.iter().enumerate() {
                let v = ks.map(|k| comp[k]);
                let gr = 0.5 * ((v[1] - v[0]) + (v[3] - v[2])) / dr;
                let gz = 0.5 * ((v[2] - v[0]) + (v[3] - v[1])) / dz;
                g2 += gr * gr + gz * gz;
                if c < 2 {
                    let mid = 0.25 * v.iter().sum::<f64>() / rc;
                    g2 += mid * mid;
                }
            }
            h1 += 2.0 * PI * rc * dr * dz * g2;
        }
    }

    let total: f64 = w.iter().sum();
    let pa = a.p.iter().zip(&w).map(|(&p, w)| f(p) * w).sum::<f64>() / total;
    let pb = b.p.iter().zip(&w).map(|(&p, w)| f(p) * w).sum::<f64>() / total;
    let p_l2 = (0..n)
        .map(|k| {
            let d = (f(a.p[k]) - pa) - (f(b.p[k]) - pb);
            w[k] * d * d
        })
        .sum::<f64>()
        .sqrt();

    ErrorNorms { l2, h1: h1.sqrt(), p_l2 }
}

/// Norms of the error of `state` against the manufactured solution at time `t`.
pub fn discrete_norms<T: Real>(state: &FieldState<T>, case: &ManufacturedCase, grid: &MeridianGrid<T>, t: f64) -> ErrorNorms {
    error_norms(state, &case.sample(grid, t), grid)
}

/// One rung of the refinement ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmsLevel {
    pub h: f64,
    pub tau: f64,
    pub err: ErrorNorms,
    /// Observed orders against the previous (coarser) level.
    pub slope_l2: Option<f64>,
    pub slope_h1: Option<f64>,
}

/// Refinement study settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmsSettings {
    pub re: f64,
    /// Intervals per unit length on the coarsest grid.
    pub base_cells: usize,
    /// Time step on the coarsest level.
    pub base_tau: f64,
    /// Steps taken from exact data on every level.
    pub steps: usize,
    pub t0: f64,
}

impl Default for MmsSettings {
    fn default() -> Self {
        MmsSettings {
            re: 100.0,
            base_cells: 16,
            base_tau: 0.04,
            steps: 1,
            t0: 0.0,
        }
    }
}

/// Runs the manufactured case on `levels` grids, halving `h` and `τ`
/// together, starting each level from the exact solution.
pub fn mms_convergence(levels: usize) -> Result<Vec<MmsLevel>> {
    mms_convergence_with(levels, &MmsSettings::default())
}

pub fn mms_convergence_with(levels: usize, settings: &MmsSettings) -> Result<Vec<MmsLevel>> {
    if levels < 2 {
        return Err(Error::Parameter(format!("mms needs at least 2 levels, got {levels}")));
    }
    let case = manufactured_case(settings.re);
    let solver = SolverSettings {
        lin_tol: 1e-12,
        lin_maxit: 20,
        h_rule: HRule::LocalCell,
        ..Default::default()
    };
    let mut out: Vec<MmsLevel> = Vec::with_capacity(levels);
    for level in 0..levels {
        let cells = settings.base_cells << level;
        let tau = settings.base_tau / (1u64 << level) as f64;
        let grid = uniform_grid(cells, case.z0, case.z1);
        let mut stepper = Stepper::new(grid.clone(), solver, tau, settings.re)?;
        let mut state = case.sample::<f64>(&grid, settings.t0);
        for _ in 0..settings.steps {
            state = stepper.advance(&state, Some(&case))?;
        }
        let t = settings.t0 + settings.steps as f64 * tau;
        let err = discrete_norms(&state, &case, &grid, t);
        let h = 1.0 / cells as f64;
        let slope = |now: f64, before: f64, h0: f64| (before / now).ln() / (h0 / h).ln();
        let (slope_l2, slope_h1) = match out.last() {
            Some(prev) => (Some(slope(err.l2, prev.err.l2, prev.h)), Some(slope(err.h1, prev.err.h1, prev.h))),
            None => (None, None),
        };
        out.push(MmsLevel { h, tau, err, slope_l2, slope_h1 });
    }
    Ok(out)
}

/// Uniform grid with `cells` intervals per unit length in both directions.
fn uniform_grid(cells: usize, z0: f64, z1: f64) -> MeridianGrid<f64> {
    let nz = ((z1 - z0) * cells as f64).round() as usize;
    let r = (0..=cells).map(|i| i as f64 / cells as f64).collect();
    let z = (0..=nz).map(|j| z0 + (z1 - z0) * j as f64 / nz as f64).collect();
    MeridianGrid::from_nodes(r, z)
}
