//! Schrödinger–Poisson solver with a steep potential well.
//!
//! Finds critical points of
//! `I(u) = 1/2 int |grad u|^2 + V_mu u^2 + lambda/4 int phi_u u^2 - 1/(p+1) int |u|^{p+1}`
//! with `-Delta phi_u = u^2` and `V_mu = 1 + mu g`, on discrete balls `B_k`, and checks the
//! a-priori constants and inequalities known for them.
//!
//! The numerics are generic over [`Real`] (`f32`, `f64`); the aliases at the crate root fix
//! `f64`.

// `!(x > 0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod discretization;
pub mod energy;
pub mod error;
pub mod linalg;
pub mod params;
pub mod poisson;
pub mod real;
pub mod solver;
pub mod wells;

pub use error::{Error, Result};
pub use real::Real;
pub use wells::{Ball, Omega0, Well};

pub type Grid = discretization::Grid<f64>;
pub type Field = discretization::Field<f64>;
pub type Params = params::Params<f64>;
pub type ConstantSet = bounds::ConstantSet<f64>;
pub type Solution = solver::Solution<f64>;
