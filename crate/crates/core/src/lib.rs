//! Frailty-adjusted hazard ratios from summary data.
//!
//! A Cox model fitted among survivors estimates a *marginal* hazard ratio:
//! the exposed and unexposed survivors no longer share the same frailty
//! distribution, so the estimate is pulled toward (and past) the null as
//! follow-up starts later. Given a power-variance-function (PVF) frailty
//! family, the twin recurrence risk `TRR(t1)` and the population survival
//! `S(t1)` pin down the frailty variance, which in turn maps the marginal
//! hazard ratio onto the hazard ratio conditional on frailty.
//!
//! Modules:
//!
//! - [`pvf`]: Laplace transform, survival, hazard inversion and TRR of the PVF family.
//! - [`solver`]: recover `nu` from `{TRR(t1), S(t1)}`.
//! - [`adjust`]: marginal <-> causal hazard ratio maps and the figure curves.
//! - [`uncertainty`]: Monte-Carlo and plug-in confidence intervals.
//! - [`sim`]: cohort and twin-registry simulation, Cox fitting, coverage studies.
//! - [`iv`]: Mendelian-randomization estimate per unit of exposure.
//!
//! The crate is `no_std` and needs only `alloc`. Parallel execution is
//! injected through [`exec::Executor`]; every stochastic routine draws from
//! per-index substreams so results do not depend on the executor.

#![no_std]
#![deny(rust_2018_idioms)]
// `Float` methods turn inherent whenever std is linked into the build graph.
#![allow(unused_imports)]
// `!(a < b)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod adjust;
pub mod error;
pub mod exec;
pub mod iv;
pub mod pvf;
pub mod rng;
pub mod sim;
pub mod solver;
pub mod stats;
pub mod uncertainty;

mod root;

pub use adjust::HazardRatio;
pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use pvf::{CumulativeHazard, PvfFamily, PvfParams};
pub use solver::FrailtySummary;
pub use uncertainty::{CiConfig, Scale, SummaryEstimate};
