//! Axisymmetric incompressible flow with swirl in a closed cylinder, advanced by
//! a semi-Lagrangian, pressure-stabilized scheme on the meridian plane.
//!
//! The numerical core is generic over the scalar type ([`Real`], implemented
//! for `f32` and `f64`); the aliases below fix it to `f64`.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod fields;
pub mod grid;
pub mod initial;
pub mod io;
mod real;
pub mod solver;
pub mod state;
pub mod verification;

pub use config::{HRule, Profile, SimConfig};
pub use error::{Error, Result};
pub use grid::{DomainKind, DomainVariant};
pub use real::Real;

pub type Grid = grid::MeridianGrid<f64>;
pub type State = state::FieldState<f64>;
pub type Record = diagnostics::DiagnosticsRecord<f64>;
pub type Vorticity = fields::VorticityField<f64>;
pub type Output = solver::RunOutput<f64>;
