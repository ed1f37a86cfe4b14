//! The energy functional, its derivative, and the mountain-pass geometry.

mod functional;
mod geometry;
mod sobolev;

pub use functional::{energy, residual, EnergyBreakdown, Fibering, Functional, Residual};
pub use geometry::{bump, endpoint_subquadratic, endpoint_supercubic, mp_level_upper, Endpoint, MpUpper};
pub use sobolev::{h1_ground_state, h1_sobolev, H1GroundState, SmallSphere};
