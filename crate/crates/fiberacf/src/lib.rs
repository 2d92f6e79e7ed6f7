//! Command-line tooling around `fiberacf-core`: configuration files, CSV
//! output, a parallel trial runner, figure data and validation suites.

// `!(x > y)` deliberately rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod figures;
pub mod output;
pub mod runner;
pub mod validate;
