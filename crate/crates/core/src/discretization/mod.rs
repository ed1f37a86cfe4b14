//! Discrete balls `B_k`, fields on them, quadrature, norms and zero extension.

mod dump;
mod extend;
mod field;
mod grid;
mod quadrature;

pub use dump::{dump_field, read_dump, DumpHeader};
pub use extend::extend;
pub use field::Field;
pub use grid::{Grid, GridKind};
pub(crate) use quadrature::{dv_inner_with, power_integral};
pub use quadrature::{dv_inner, integrate, lq_norm, two_star};

pub use crate::params::{Params, Regime};
