//! Statistics of the dispersion-free nonlinear fiber channel with distributed
//! amplifier noise.
//!
//! The crate computes the exact two-time autocorrelation of the channel
//! output, its low-noise approximation, cyclostationary power spectra,
//! received-power bounds under ideal filtering, and the capacity bounds that
//! follow from them. A seeded Monte Carlo sampler of the underlying stochastic
//! model doubles as an independent check on the closed forms.
//!
//! Everything here is `no_std` with `alloc`; IO and parallelism live in the
//! `fiberacf` companion crate.

#![no_std]
#![forbid(unsafe_code)]
#![warn(missing_docs)]
// `!(x >= 0.0)` is used deliberately so that NaN fails domain checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod acf;
pub mod bounds;
pub mod capacity;
mod error;
pub mod mc;
pub mod params;
pub mod quad;
pub mod special;
pub mod spectrum;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use params::{DerivedConstants, FiberParams};
