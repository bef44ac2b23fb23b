//! Closed-form swirl / no-swirl initial velocity family.

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::grid::MeridianGrid;
use crate::real::Real;
use crate::state::FieldState;

/// Shape constants `ε₁…ε₆`, `β₁…β₆` and the swirl switch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialParams {
    pub eps: [f64; 6],
    pub beta: [f64; 6],
    pub swirl: bool,
}

impl Default for InitialParams {
    fn default() -> Self {
        InitialParams {
            eps: [1.0; 6],
            beta: [1.0; 6],
            swirl: true,
        }
    }
}

impl InitialParams {
    pub fn from_config(c: &SimConfig) -> Self {
        InitialParams {
            eps: c.eps,
            beta: c.beta,
            swirl: c.swirl,
        }
    }
}

/// `(s² + eps)^sigma`.
pub fn phi<T: Real>(s: T, eps: T, sigma: T) -> Result<T> {
    if !(eps > T::zero()) {
        return Err(Error::Parameter(format!("phi needs eps > 0, got {eps}")));
    }
    Ok((s * s + eps).powf(sigma))
}

/// `sign` with `sign(0) = 0`.
fn sign0<T: Real>(z: T) -> T {
    if z > T::zero() {
        T::one()
    } else if z < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

/// Nodal initial velocity, flagged as pre-stage.
///
/// `u_z = φ(r,ε₁,-β₁)φ(z,ε₂,-β₂)`, `ρ = φ(r,ε₃,-β₃)φ(z,ε₄,β₄)`,
/// `u_r = sign(z) ρ u_z`, `u_θ = φ(r,ε₅,-β₅)φ(z,ε₆,-β₆)` (zero without swirl), `p = 0`.
/// The field is neither solenoidal nor zero on the walls; the first solver step enforces both.
pub fn initial_field<T: Real>(params: &InitialParams, grid: &MeridianGrid<T>) -> Result<FieldState<T>> {
    let e = params.eps.map(T::lit);
    let b = params.beta.map(T::lit);
    let mut state = FieldState::zeros(grid.len());
    state.pre_stage = true;
    for (j, &z) in grid.z.iter().enumerate() {
        for (i, &r) in grid.r.iter().enumerate() {
            let k = grid.idx(i, j);
            let uz = phi(r, e[0], -b[0])? * phi(z, e[1], -b[1])?;
            let rho = phi(r, e[2], -b[2])? * phi(z, e[3], b[3])?;
            state.u_r[k] = sign0(z) * rho * uz;
            state.u_z[k] = uz;
            state.u_theta[k] = if params.swirl {
                phi(r, e[4], -b[4])? * phi(z, e[5], -b[5])?
            } else {
                T::zero()
            };
        }
    }
    Ok(state)
}
