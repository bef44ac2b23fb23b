//! Characteristic feet and field evaluation off the grid nodes.

use crate::error::Result;
use crate::grid::MeridianGrid;
use crate::real::Real;
use crate::state::FieldState;

/// Bilinear `(u_r, u_θ, u_z)` at `(r, z)`.
pub fn interpolate<T: Real>(state: &FieldState<T>, grid: &MeridianGrid<T>, point: (T, T)) -> Result<(T, T, T)> {
    let loc = grid.locate(point.0, point.1)?;
    Ok((
        grid.interpolate_at(&state.u_r, &loc),
        grid.interpolate_at(&state.u_theta, &loc),
        grid.interpolate_at(&state.u_z, &loc),
    ))
}

/// Meridian coordinates of the foot of the characteristic through `point`.
///
/// The characteristic is followed in three dimensions, `x - v τ` with the full
/// interpolated velocity including swirl, and mapped back to `(r, z)`. Feet
/// outside the closed domain are pulled back along the segment to the boundary.
pub fn backtrack<T: Real>(state: &FieldState<T>, grid: &MeridianGrid<T>, point: (T, T), tau: T) -> Result<(T, T)> {
    let vel = interpolate(state, grid, point)?;
    let f = departure(grid, point, vel, tau);
    Ok((f.r, f.z))
}

/// Foot of a characteristic: meridian position plus the azimuth, relative to
/// the arrival point, at which it lies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Foot<T> {
    pub r: T,
    pub z: T,
    pub cos: T,
    pub sin: T,
}

impl<T: Real> Foot<T> {
    /// Radial and azimuthal components, in the arrival point's basis, of a
    /// vector given in the foot's cylindrical basis.
    #[inline]
    pub fn rotate(&self, v_r: T, v_theta: T) -> (T, T) {
        (v_r * self.cos - v_theta * self.sin, v_r * self.sin + v_theta * self.cos)
    }
}

/// Departure point for a known velocity `(u_r, u_θ, u_z)` at `point`.
pub(crate) fn departure<T: Real>(grid: &MeridianGrid<T>, point: (T, T), vel: (T, T, T), tau: T) -> Foot<T> {
    let (r0, z0) = point;
    let (a, b, c) = (vel.0 * tau, vel.1 * tau, vel.2 * tau);
    let (rhi, zlo, zhi) = (grid.r_max(), grid.z_min(), grid.z_max());
    let mut s = T::one();
    let z1 = z0 - c;
    if z1 < zlo {
        s = s.min((z0 - zlo) / c);
    } else if z1 > zhi {
        s = s.min((z0 - zhi) / c);
    }
    // (r0 - s a)² + (s b)² = rhi²
    let (x1, x2) = (r0 - a, -b);
    if x1 * x1 + x2 * x2 > rhi * rhi {
        let q = a * a + b * b;
        let disc = (r0 * r0 * a * a - q * (r0 * r0 - rhi * rhi)).max(T::zero());
        s = s.min((r0 * a + disc.sqrt()) / q);
    }
    let s = s.max(T::zero());
    let (x1, x2) = (r0 - s * a, -s * b);
    let rr = (x1 * x1 + x2 * x2).sqrt();
    let (cos, sin) = if rr > T::zero() { (x1 / rr, x2 / rr) } else { (T::one(), T::zero()) };
    Foot {
        r: rr.max(grid.r[0]).min(rhi),
        z: (z0 - s * c).max(zlo).min(zhi),
        cos,
        sin,
    }
}
