//! Semi-Lagrangian, pressure-stabilized time stepping of the axisymmetric
//! Navier-Stokes system with swirl.
//!
//! Each step solves
//!
//! ```text
//! (v^k - v^{k-1}∘X) / τ - ν (Δv^k - v_r^k/r² e_r) + ∇p^k = f
//! ∇·v^k - δ₀ h² Δp^k = 0
//! ```
//!
//! for `(u_r, u_z, p)` as one coupled system, followed by a scalar solve for
//! the circulation `Γ = r u_θ`:
//!
//! ```text
//! (Γ^k - r (v^{k-1}∘X)_θ) / τ - ν (∂_r²Γ - ∂_rΓ/r + ∂_z²Γ)^k = r f_θ
//! ```
//!
//! `X` is the foot of the three-dimensional characteristic through each node,
//! using the full velocity including swirl. The previous velocity is sampled
//! there and rotated into the arrival node's cylindrical basis, so the
//! centrifugal and Coriolis terms come from the transport itself rather than
//! from explicit `u_θ²/r` and `u_r u_θ/r` sources.
//!
//! The discretization is a vertex-centred finite volume scheme on the graded
//! tensor grid with the cylindrical measure `r dr dz`. Divergence and pressure
//! gradient are exact negative adjoints in that measure, and the stabilizing
//! pressure Laplacian is in flux form with zero boundary flux, so the summed
//! continuity rows vanish identically and pinning one pressure value only
//! removes the constant mode.
//!
//! Both matrices depend only on the grid, `τ`, `ν` and `δ₀`; they are factored
//! once per [`Stepper`].

pub mod band;
pub mod characteristics;
mod run;
pub mod sparse;

pub use characteristics::{backtrack, interpolate};
pub use run::{run, run_with, RunOutput, Simulation};

use crate::config::{HRule, SimConfig};
use crate::error::{Error, Result};
use crate::grid::MeridianGrid;
use crate::real::Real;
use crate::state::FieldState;
use band::BandLu;
use characteristics::departure;
use sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Stabilization coefficient `δ₀`.
    pub delta0: f64,
    /// Relative residual target for each linear solve.
    pub lin_tol: f64,
    /// Maximum refinement sweeps per linear solve.
    pub lin_maxit: usize,
    pub h_rule: HRule,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            delta0: 1.0,
            lin_tol: 1e-8,
            lin_maxit: 10,
            h_rule: HRule::LocalCell,
        }
    }
}

impl SolverSettings {
    pub fn from_config(c: &SimConfig) -> Self {
        SolverSettings {
            delta0: c.delta0,
            lin_tol: c.lin_tol,
            lin_maxit: c.lin_maxit,
            h_rule: c.h_rule,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta0 > 0.0) {
            return Err(Error::config("delta0", None, "must be positive"));
        }
        if !(self.lin_tol > 0.0 && self.lin_tol < 1.0) {
            return Err(Error::config("lin_tol", None, "must lie in (0, 1)"));
        }
        if self.lin_maxit == 0 {
            return Err(Error::config("lin_maxit", None, "must be at least 1"));
        }
        Ok(())
    }
}

/// Body force `(f_r, f_θ, f_z)` added to the momentum equations.
pub trait Forcing<T>: Sync {
    fn eval(&self, r: T, z: T, t: T) -> [T; 3];
}

impl<T, F> Forcing<T> for F
where
    F: Fn(T, T, T) -> [T; 3] + Sync,
{
    fn eval(&self, r: T, z: T, t: T) -> [T; 3] {
        self(r, z, t)
    }
}

/// Unknown slots of the coupled system.
const UR: usize = 0;
const UZ: usize = 1;
const P: usize = 2;

/// Factored step operators for one grid, time step and viscosity.
pub struct Stepper<T> {
    grid: MeridianGrid<T>,
    settings: SolverSettings,
    tau: T,
    nu: T,
    coupled: CsrMatrix<T>,
    coupled_lu: BandLu<T>,
    swirl: CsrMatrix<T>,
    swirl_lu: BandLu<T>,
    pinned: usize,
    weights: Vec<T>,
    steps_taken: usize,
}

impl<T: Real> Stepper<T> {
    pub fn new(grid: MeridianGrid<T>, settings: SolverSettings, tau: T, re: T) -> Result<Self> {
        settings.validate()?;
        if !(tau > T::zero()) {
            return Err(Error::config("tau", None, "must be positive"));
        }
        if !(re > T::zero()) {
            return Err(Error::config("re", None, "must be positive"));
        }
        let nu = T::one() / re;
        let ops = Operators::new(&grid, &settings);
        let pinned = grid.idx(grid.nr() - 1, grid.nz() - 1);
        let coupled = ops.coupled_matrix(tau, nu, pinned);
        let coupled_lu = coupled.to_band().factor()?;
        let swirl = ops.swirl_matrix(tau, nu);
        let swirl_lu = swirl.to_band().factor()?;
        let weights = grid.weights();
        Ok(Stepper {
            grid,
            settings,
            tau,
            nu,
            coupled,
            coupled_lu,
            swirl,
            swirl_lu,
            pinned,
            weights,
            steps_taken: 0,
        })
    }

    pub fn grid(&self) -> &MeridianGrid<T> {
        &self.grid
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn nu(&self) -> T {
        self.nu
    }

    /// Advances `prev` by one time step.
    pub fn advance(&mut self, prev: &FieldState<T>, forcing: Option<&dyn Forcing<T>>) -> Result<FieldState<T>> {
        let g = &self.grid;
        let (nr, nz) = (g.nr(), g.nz());
        let n = g.len();
        assert_eq!(prev.len(), n, "state does not match grid");
        let tau = self.tau;
        let inv_tau = T::one() / tau;
        let t_new = prev.t + tau;
        let step = self.steps_taken + 1;

        let mut rhs = vec![T::zero(); 3 * n];
        let mut rhs_gamma = vec![T::zero(); n];
        for j in 1..nz.saturating_sub(1) {
            let z = g.z[j];
            // axis rows are homogeneous (u_r = 0, Γ = 0, ∂_r u_z = 0)
            for i in 1..nr - 1 {
                let k = g.idx(i, j);
                let r = g.r[i];
                let foot = departure(g, (r, z), (prev.u_r[k], prev.u_theta[k], prev.u_z[k]), tau);
                let loc = g.locate(foot.r, foot.z)?;
                let (vr, vt) = foot.rotate(g.interpolate_at(&prev.u_r, &loc), g.interpolate_at(&prev.u_theta, &loc));
                let f = forcing.map(|f| f.eval(r, z, t_new)).unwrap_or([T::zero(); 3]);
                rhs[3 * k + UR] = vr * inv_tau + f[0];
                rhs[3 * k + UZ] = g.interpolate_at(&prev.u_z, &loc) * inv_tau + f[2];
                rhs_gamma[k] = r * (vt * inv_tau + f[1]);
            }
        }

        let x = solve_refined(&self.coupled, &self.coupled_lu, &rhs, &self.settings, step)?;
        let gam = solve_refined(&self.swirl, &self.swirl_lu, &rhs_gamma, &self.settings, step)?;

        let mut next = FieldState::zeros(n);
        next.t = t_new;
        for j in 0..nz {
            for i in 0..nr {
                let k = g.idx(i, j);
                next.u_r[k] = x[3 * k + UR];
                next.u_z[k] = x[3 * k + UZ];
                next.p[k] = x[3 * k + P];
                next.u_theta[k] = if i == 0 { T::zero() } else { gam[k] / g.r[i] };
            }
        }
        // constraints hold exactly, not just to solver tolerance
        for j in 0..nz {
            for i in 0..nr {
                let k = g.idx(i, j);
                if g.is_wall(i, j) {
                    next.u_r[k] = T::zero();
                    next.u_z[k] = T::zero();
                    next.u_theta[k] = T::zero();
                } else if i == 0 {
                    next.u_r[k] = T::zero();
                }
            }
        }
        let total = self.weights.iter().fold(T::zero(), |a, &b| a + b);
        let mean = next
            .p
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |a, (&p, &w)| a + p * w)
            / total;
        next.p.iter_mut().for_each(|p| *p = *p - mean);

        if !next.is_finite() {
            return Err(Error::Diverged { t: t_new.to_f64_lossy() });
        }
        debug_assert!(self.pinned < n);
        self.steps_taken = step;
        Ok(next)
    }

    /// Residual of the discrete stabilized continuity equation at every node,
    /// `(∇·v - δ₀h²Δp)` per unit volume.
    pub fn continuity_residual(&self, state: &FieldState<T>) -> Vec<T> {
        let ops = Operators::new(&self.grid, &self.settings);
        ops.continuity_residual(state)
    }
}

/// LU solve followed by iterative refinement until the relative residual
/// drops below `lin_tol`.
fn solve_refined<T: Real>(
    a: &CsrMatrix<T>,
    lu: &BandLu<T>,
    b: &[T],
    settings: &SolverSettings,
    step: usize,
) -> Result<Vec<T>> {
    let norm = |v: &[T]| v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let bn = norm(b);
    let mut x = b.to_vec();
    lu.solve(&mut x);
    if bn == T::zero() {
        return Ok(x);
    }
    let tol = T::lit(settings.lin_tol);
    let mut history = Vec::new();
    let mut ax = vec![T::zero(); b.len()];
    for _ in 0..settings.lin_maxit {
        a.mul_vec(&x, &mut ax);
        let mut res: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
        let rel = norm(&res) / bn;
        history.push(rel.to_f64_lossy());
        if rel <= tol {
            return Ok(x);
        }
        if !rel.is_finite() {
            break;
        }
        lu.solve(&mut res);
        x.iter_mut().zip(&res).for_each(|(xi, &d)| *xi = *xi + d);
    }
    Err(Error::StepFailure { step, residuals: history })
}

/// Geometric coefficients of the finite volume operators.
struct Operators<'a, T> {
    g: &'a MeridianGrid<T>,
    delta0: T,
    h_rule: HRule,
    /// `r`-weighted radial control volumes.
    vr: Vec<T>,
    /// Axial control volume widths.
    dz: Vec<T>,
    /// Radial extent of each control volume.
    dr: Vec<T>,
}

impl<'a, T: Real> Operators<'a, T> {
    fn new(g: &'a MeridianGrid<T>, settings: &SolverSettings) -> Self {
        Operators {
            g,
            delta0: T::lit(settings.delta0),
            h_rule: settings.h_rule,
            vr: (0..g.nr()).map(|i| g.radial_volume(i)).collect(),
            dz: (0..g.nz()).map(|j| g.axial_width(j)).collect(),
            dr: (0..g.nr()).map(|i| g.r_face_above(i) - g.r_face_below(i)).collect(),
        }
    }

    /// Face `r` between radial nodes `i` and `i + 1`.
    fn rf(&self, i: usize) -> T {
        (self.g.r[i] + self.g.r[i + 1]) * T::half()
    }

    /// Squared stabilization length on the radial face `(i+½, j)`.
    fn h2_radial_face(&self, i: usize, j: usize) -> T {
        match self.h_rule {
            HRule::Representative => self.g.h_avg * self.g.h_avg,
            HRule::LocalCell => {
                let h = (self.g.r[i + 1] - self.g.r[i]).max(self.axial_extent(j));
                h * h
            }
        }
    }

    /// Squared stabilization length on the axial face `(i, j+½)`.
    fn h2_axial_face(&self, i: usize, j: usize) -> T {
        match self.h_rule {
            HRule::Representative => self.g.h_avg * self.g.h_avg,
            HRule::LocalCell => {
                let h = (self.g.z[j + 1] - self.g.z[j]).max(self.radial_extent(i));
                h * h
            }
        }
    }

    fn axial_extent(&self, j: usize) -> T {
        let z = &self.g.z;
        let n = z.len();
        if j == 0 {
            z[1] - z[0]
        } else if j + 1 == n {
            z[n - 1] - z[n - 2]
        } else {
            (z[j + 1] - z[j - 1]) * T::half()
        }
    }

    fn radial_extent(&self, i: usize) -> T {
        let r = &self.g.r;
        let n = r.len();
        if i == 0 {
            r[1] - r[0]
        } else if i + 1 == n {
            r[n - 1] - r[n - 2]
        } else {
            (r[i + 1] - r[i - 1]) * T::half()
        }
    }

    /// Coefficients of `∂_r u` at the axis from a one-sided three-point stencil.
    fn axis_neumann(&self) -> Vec<(usize, T)> {
        let r = &self.g.r;
        if r.len() < 3 {
            return vec![(0, -T::one()), (1, T::one())];
        }
        let (h1, h2) = (r[1] - r[0], r[2] - r[1]);
        let c0 = -(T::two() * h1 + h2) / (h1 * (h1 + h2));
        let c1 = (h1 + h2) / (h1 * h2);
        let c2 = -h1 / (h2 * (h1 + h2));
        vec![(0, c0), (1, c1), (2, c2)]
    }

    /// Viscous, pressure and inertia terms of the `u_r`/`u_z` momentum rows
    /// and the volume-scaled stabilized continuity rows.
    fn coupled_matrix(&self, tau: T, nu: T, pinned: usize) -> CsrMatrix<T> {
        let g = self.g;
        let (nr, nz) = (g.nr(), g.nz());
        let var = |i: usize, j: usize, c: usize| 3 * g.idx(i, j) + c;
        let inv_tau = T::one() / tau;
        let half = T::half();
        let mut a = CsrMatrix::new();
        let mut row = Vec::with_capacity(16);
        for j in 0..nz {
            for i in 0..nr {
                let wall = g.is_wall(i, j);
                let k = g.idx(i, j);
                // u_r
                if wall || i == 0 {
                    row.push((var(i, j, UR), T::one()));
                } else {
                    self.momentum_row(&mut row, i, j, UR, inv_tau, nu);
                    let (ae, aw) = (self.rf(i), self.rf(i - 1));
                    let s = half / self.vr[i];
                    row.push((var(i + 1, j, P), ae * s));
                    row.push((var(i, j, P), (aw - ae) * s));
                    row.push((var(i - 1, j, P), -aw * s));
                }
                a.push_row(&mut row);
                // u_z
                if wall {
                    row.push((var(i, j, UZ), T::one()));
                } else if i == 0 {
                    for (ii, c) in self.axis_neumann() {
                        row.push((var(ii, j, UZ), c));
                    }
                } else {
                    self.momentum_row(&mut row, i, j, UZ, inv_tau, nu);
                    let s = half / self.dz[j];
                    row.push((var(i, j + 1, P), s));
                    row.push((var(i, j - 1, P), -s));
                }
                a.push_row(&mut row);
                // p
                if k == pinned {
                    row.push((var(i, j, P), T::one()));
                } else {
                    self.continuity_row(&mut row, i, j);
                }
                a.push_row(&mut row);
            }
        }
        a
    }

    /// `(1/τ) u - ν (Δu - [c = u_r] u/r²)` at interior node `(i, j)`.
    fn momentum_row(&self, row: &mut Vec<(usize, T)>, i: usize, j: usize, c: usize, inv_tau: T, nu: T) {
        let g = self.g;
        let var = |i: usize, j: usize| 3 * g.idx(i, j) + c;
        let ae = self.rf(i) / (g.r[i + 1] - g.r[i]) / self.vr[i];
        let aw = self.rf(i - 1) / (g.r[i] - g.r[i - 1]) / self.vr[i];
        let an = T::one() / (g.z[j + 1] - g.z[j]) / self.dz[j];
        let as_ = T::one() / (g.z[j] - g.z[j - 1]) / self.dz[j];
        let mut diag = inv_tau + nu * (ae + aw + an + as_);
        if c == UR {
            diag = diag + nu / (g.r[i] * g.r[i]);
        }
        row.push((var(i, j), diag));
        row.push((var(i + 1, j), -nu * ae));
        row.push((var(i - 1, j), -nu * aw));
        row.push((var(i, j + 1), -nu * an));
        row.push((var(i, j - 1), -nu * as_));
    }

    /// `V (∇·v - δ₀ ∇·(h²∇p))` over the control volume of node `(i, j)`.
    fn continuity_row(&self, row: &mut Vec<(usize, T)>, i: usize, j: usize) {
        let g = self.g;
        let (nr, nz) = (g.nr(), g.nz());
        let var = |i: usize, j: usize, c: usize| 3 * g.idx(i, j) + c;
        let half = T::half();
        let dz = self.dz[j];
        let vr = self.vr[i];
        // radial mass flux r u_r through the east/west faces
        if i + 1 < nr {
            let f = self.rf(i) * half * dz;
            row.push((var(i, j, UR), f));
            row.push((var(i + 1, j, UR), f));
            let s = self.delta0 * self.h2_radial_face(i, j) * self.rf(i) / (g.r[i + 1] - g.r[i]) * dz;
            row.push((var(i + 1, j, P), -s));
            row.push((var(i, j, P), s));
        } else {
            row.push((var(i, j, UR), g.r[i] * dz));
        }
        if i > 0 {
            let f = self.rf(i - 1) * half * dz;
            row.push((var(i, j, UR), -f));
            row.push((var(i - 1, j, UR), -f));
            let s = self.delta0 * self.h2_radial_face(i - 1, j) * self.rf(i - 1) / (g.r[i] - g.r[i - 1]) * dz;
            row.push((var(i - 1, j, P), -s));
            row.push((var(i, j, P), s));
        }
        // axial flux
        if j + 1 < nz {
            let f = half * vr;
            row.push((var(i, j, UZ), f));
            row.push((var(i, j + 1, UZ), f));
            let s = self.delta0 * self.h2_axial_face(i, j) / (g.z[j + 1] - g.z[j]) * vr;
            row.push((var(i, j + 1, P), -s));
            row.push((var(i, j, P), s));
        } else {
            row.push((var(i, j, UZ), vr));
        }
        if j > 0 {
            let f = half * vr;
            row.push((var(i, j, UZ), -f));
            row.push((var(i, j - 1, UZ), -f));
            let s = self.delta0 * self.h2_axial_face(i, j - 1) / (g.z[j] - g.z[j - 1]) * vr;
            row.push((var(i, j - 1, P), -s));
            row.push((var(i, j, P), s));
        } else {
            row.push((var(i, j, UZ), -vr));
        }
    }

    fn continuity_residual(&self, state: &FieldState<T>) -> Vec<T> {
        let g = self.g;
        let n = g.len();
        let mut x = vec![T::zero(); 3 * n];
        for k in 0..n {
            x[3 * k + UR] = state.u_r[k];
            x[3 * k + UZ] = state.u_z[k];
            x[3 * k + P] = state.p[k];
        }
        let mut out = Vec::with_capacity(n);
        let mut row = Vec::new();
        for j in 0..g.nz() {
            for i in 0..g.nr() {
                self.continuity_row(&mut row, i, j);
                let v = row.iter().fold(T::zero(), |acc, &(c, a)| acc + a * x[c]);
                out.push(v / (self.vr[i] * self.dz[j]));
                row.clear();
            }
        }
        out
    }

    /// `(1/τ)Γ - ν (r ∂_r(∂_rΓ / r) + ∂_z²Γ)` inside, `Γ = 0` on the axis and walls.
    fn swirl_matrix(&self, tau: T, nu: T) -> CsrMatrix<T> {
        let g = self.g;
        let (nr, nz) = (g.nr(), g.nz());
        let inv_tau = T::one() / tau;
        let mut a = CsrMatrix::new();
        let mut row = Vec::with_capacity(5);
        for j in 0..nz {
            for i in 0..nr {
                let k = g.idx(i, j);
                if g.is_wall(i, j) || i == 0 {
                    row.push((k, T::one()));
                } else {
                    let ri = g.r[i];
                    let ae = ri / (self.rf(i) * (g.r[i + 1] - ri)) / self.dr[i];
                    let aw = ri / (self.rf(i - 1) * (ri - g.r[i - 1])) / self.dr[i];
                    let an = T::one() / (g.z[j + 1] - g.z[j]) / self.dz[j];
                    let as_ = T::one() / (g.z[j] - g.z[j - 1]) / self.dz[j];
                    row.push((k, inv_tau + nu * (ae + aw + an + as_)));
                    row.push((g.idx(i + 1, j), -nu * ae));
                    row.push((g.idx(i - 1, j), -nu * aw));
                    row.push((g.idx(i, j + 1), -nu * an));
                    row.push((g.idx(i, j - 1), -nu * as_));
                }
                a.push_row(&mut row);
            }
        }
        a
    }
}
