use alloc::format;
use alloc::vec::Vec;

use super::{
    estimate_survival, estimate_trr, fit_cox_binary, simulate_cohort, simulate_survey,
    simulate_twin_pairs, CoxFit,
};
use crate::error::{Error, Result};
use crate::exec::{Executor, Sequential};
use crate::pvf::PvfFamily;
use crate::rng::{derive_seed, stream_rng};
use crate::stats::median;
use crate::uncertainty::{numeric_ci_with, CiConfig, NumericCi, SummaryEstimate};

/// Inputs of one simulated study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    /// Subjects drawn per exposure arm, before truncation at `t1`.
    pub n_per_arm: usize,
    pub n_twin_pairs: usize,
    pub n_survey: usize,
    /// Constant baseline hazard rate per year.
    pub h0: f64,
    /// Gamma frailty shape; the frailty variance is `1 / nu`.
    pub nu: f64,
    /// Hazard ratio conditional on frailty.
    pub r_cau: f64,
    /// Age at start of follow-up.
    pub t1: f64,
    /// Length of follow-up in years.
    pub delta: f64,
    pub seed: u64,
    /// Monte-Carlo draws for the adjusted interval.
    pub n_draws: usize,
}

impl ScenarioConfig {
    /// `r_cau = 0.8`, `h0 = 0.002`, `nu = 1/9`, `10^4` subjects per sample.
    pub fn scenario1() -> Self {
        ScenarioConfig {
            n_per_arm: 10_000,
            n_twin_pairs: 10_000,
            n_survey: 10_000,
            h0: 0.002,
            nu: 1.0 / 9.0,
            r_cau: 0.8,
            t1: 50.0,
            delta: 1.0,
            seed: 0,
            n_draws: 10_000,
        }
    }

    /// `r_cau = 0.7`, `h0 = 0.003`, `nu = 1/15`, `10^5` per arm and in the survey.
    pub fn scenario2() -> Self {
        ScenarioConfig {
            n_per_arm: 100_000,
            n_survey: 100_000,
            h0: 0.003,
            nu: 1.0 / 15.0,
            r_cau: 0.7,
            ..Self::scenario1()
        }
    }

    /// `r_cau = 0.7`, `h0 = 0.03`, `nu = 1/5`, `10^5` per arm and in the survey.
    pub fn scenario3() -> Self {
        ScenarioConfig {
            h0: 0.03,
            nu: 0.2,
            ..Self::scenario2()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("n_per_arm", self.n_per_arm),
            ("n_twin_pairs", self.n_twin_pairs),
            ("n_survey", self.n_survey),
        ];
        for (key, v) in counts {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{key} must be positive")));
            }
        }
        let reals = [
            ("h0", self.h0),
            ("nu", self.nu),
            ("r_cau", self.r_cau),
            ("t1", self.t1),
            ("delta", self.delta),
        ];
        for (key, v) in reals {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "{key} = {v} must be positive and finite"
                )));
            }
        }
        self.ci_config().validate()
    }

    fn ci_config(&self) -> CiConfig {
        CiConfig {
            n_draws: self.n_draws,
            seed: derive_seed(self.seed, 4),
            ..CiConfig::default()
        }
    }
}

/// Estimates from one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub cox: CoxFit,
    pub trr: SummaryEstimate,
    pub survival: SummaryEstimate,
    pub adjusted: NumericCi,
}

/// One replication, with the Monte-Carlo interval run sequentially.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    run_scenario_with(&Sequential, cfg)
}

/// One replication; `exec` parallelises the Monte-Carlo interval.
pub fn run_scenario_with<E: Executor>(exec: &E, cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    cfg.validate()?;
    let (cox, trr, survival) = summaries(cfg)?;
    let r_mar = SummaryEstimate::log(cox.hr, cox.lo, cox.hi)?;
    let adjusted = numeric_ci_with(
        exec,
        PvfFamily::Gamma,
        &r_mar,
        &trr,
        &survival,
        &cfg.ci_config(),
    )?;
    Ok(ScenarioOutcome {
        cox,
        trr,
        survival,
        adjusted,
    })
}

fn summaries(cfg: &ScenarioConfig) -> Result<(CoxFit, SummaryEstimate, SummaryEstimate)> {
    let mut rng = stream_rng(cfg.seed, 0);
    let mut cohort = simulate_cohort(
        cfg.n_per_arm,
        cfg.nu,
        cfg.h0,
        1.0,
        false,
        cfg.t1,
        cfg.delta,
        &mut rng,
    )?;
    let mut rng = stream_rng(cfg.seed, 1);
    cohort.extend(simulate_cohort(
        cfg.n_per_arm,
        cfg.nu,
        cfg.h0,
        cfg.r_cau,
        true,
        cfg.t1,
        cfg.delta,
        &mut rng,
    )?);
    let cox = fit_cox_binary(&cohort)?;
    drop(cohort);

    let mut rng = stream_rng(cfg.seed, 2);
    let trr = estimate_trr(&simulate_twin_pairs(
        cfg.n_twin_pairs,
        cfg.nu,
        cfg.h0,
        cfg.t1,
        &mut rng,
    )?)?;
    let mut rng = stream_rng(cfg.seed, 3);
    let survival = estimate_survival(&simulate_survey(
        cfg.n_survey,
        cfg.nu,
        cfg.h0,
        cfg.t1,
        &mut rng,
    )?)?;
    Ok((cox, trr, survival))
}

/// Summary of repeated replications.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub n_reps: usize,
    pub n_failed: usize,
    pub median_r_mar: f64,
    pub median_r_adjusted: f64,
    /// Fraction of successful replications whose Cox interval contains `r_cau`.
    pub coverage_marginal: f64,
    /// Fraction of successful replications whose adjusted interval contains `r_cau`.
    pub coverage_adjusted: f64,
    /// Failed replications by [`Error::code`], most frequent first.
    pub failures: Vec<(&'static str, usize)>,
}

/// Runs `n_reps` independent replications; replication `i` uses seed
/// `derive_seed(cfg.seed, i)`. More than 5% failed replications is an error.
pub fn coverage_study<E: Executor>(
    exec: &E,
    cfg: &ScenarioConfig,
    n_reps: usize,
) -> Result<CoverageReport> {
    cfg.validate()?;
    if n_reps < 100 {
        return Err(Error::InvalidConfig(format!(
            "a coverage study needs at least 100 replications, got {n_reps}"
        )));
    }
    let base = *cfg;
    let outcomes = exec.map_indexed(n_reps, move |i| {
        let rep = ScenarioConfig {
            seed: derive_seed(base.seed, i as u64),
            ..base
        };
        run_scenario(&rep)
    });

    let mut failures: Vec<(&'static str, usize)> = Vec::new();
    let mut r_mar = Vec::with_capacity(n_reps);
    let mut r_adj = Vec::with_capacity(n_reps);
    let (mut cover_mar, mut cover_adj) = (0usize, 0usize);
    let truth = cfg.r_cau;
    for o in outcomes {
        match o {
            Ok(o) => {
                r_mar.push(o.cox.hr);
                r_adj.push(o.adjusted.point.value());
                cover_mar += usize::from(o.cox.lo <= truth && truth <= o.cox.hi);
                cover_adj += usize::from(o.adjusted.lo <= truth && truth <= o.adjusted.hi);
            }
            Err(e) => match failures.iter_mut().find(|(c, _)| *c == e.code()) {
                Some((_, n)) => *n += 1,
                None => failures.push((e.code(), 1)),
            },
        }
    }
    failures.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let n_failed = n_reps - r_mar.len();
    if n_failed * 20 > n_reps {
        return Err(Error::TooManyFailures {
            unit: "replications",
            failed: n_failed,
            total: n_reps,
            dominant: failures.first().map_or("none", |f| f.0),
        });
    }
    let ok = r_mar.len() as f64;
    Ok(CoverageReport {
        n_reps,
        n_failed,
        median_r_mar: median(&r_mar),
        median_r_adjusted: median(&r_adj),
        coverage_marginal: cover_mar as f64 / ok,
        coverage_adjusted: cover_adj as f64 / ok,
        failures,
    })
}
