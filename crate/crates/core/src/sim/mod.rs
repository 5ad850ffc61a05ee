//! Simulation of left-truncated cohorts and twin registries with gamma
//! frailty, and coverage studies of the adjustment pipeline.
//!
//! One replication draws three independent samples:
//!
//! 1. exposed and unexposed cohorts followed from `t1` for `delta` years,
//!    analysed with a Cox model (marginal hazard ratio);
//! 2. unexposed twin pairs sharing one frailty, giving `TRR(t1)`;
//! 3. an unexposed survey giving `S(t1)`.
//!
//! The three estimates are then combined by [`crate::uncertainty::numeric_ci`].

mod cohort;
mod cox;
mod estimate;
mod scenario;

pub use cohort::{
    sample_event_time, sample_frailty_gamma, simulate_cohort, simulate_survey, simulate_twin_pairs,
    Individual,
};
pub use cox::{fit_cox_binary, CoxFit};
pub use estimate::{estimate_survival, estimate_trr};
pub use scenario::{
    coverage_study, run_scenario, run_scenario_with, CoverageReport, ScenarioConfig,
    ScenarioOutcome,
};
