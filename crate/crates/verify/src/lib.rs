//! Numerical experiments for the inequalities behind the meshes: MZ bounds, tangential
//! Bernstein and Markov rates, sharpness, Steklov bounds and smaller lemmas.
//!
//! Every experiment returns an [`ExperimentReport`]. Work items run on the current rayon
//! pool and are collected in index order, so reports do not depend on the thread count.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod common;
pub mod experiments;
pub mod fit;
pub mod report;

pub use experiments::*;
pub use fit::{linear_fit, local_slopes, loglog_fit, SlopeFit};
pub use report::{ConfigEcho, ExperimentReport, Record, Summary, Verdict};
