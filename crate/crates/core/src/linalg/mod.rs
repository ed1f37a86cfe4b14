//! Small dense/banded/iterative kernels used by the PDE operators.

pub mod band;
pub mod cg;
pub mod gmres;
pub mod tridiag;
