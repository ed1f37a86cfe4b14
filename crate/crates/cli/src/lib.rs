//! Configuration, run dispatch and reporting around the `spwell` solvers.

// `!(x > 0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;
pub mod run;
pub mod table;

pub use config::{ConfigError, Mode, RunConfig};
pub use report::RunReport;
pub use run::{run, RunOutput};
