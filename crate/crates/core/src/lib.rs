//! Dependence measures and an equitability benchmark.
//!
//! * [`relations`]: the 21-relation catalog on `[0, 1]`.
//! * [`noise`]: noise at a controlled model SNR (`var(y)/var(eps)`) or
//!   signal SNR (`sum(y^2)/sum(eps^2)`).
//! * [`measures`]: ten dependence statistics.
//! * [`testing`]: permutation nulls, critical values and power.
//! * [`suite`]: score- and power-equitability experiments.
//! * [`config`] and [`report`]: experiment files and tabular output used by
//!   the `equibench` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod error;
pub mod measures;
pub mod noise;
pub mod relations;
pub mod report;
pub mod seed;
pub mod stats;
pub mod suite;
pub mod testing;

pub use error::{Error, Result};
pub use measures::{DependenceMeasure, Measure, MeasureScore};
pub use noise::NoiseTarget;
pub use relations::Relation;
