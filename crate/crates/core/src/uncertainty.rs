//! Confidence intervals for the causal hazard ratio.
//!
//! [`numeric_ci`] propagates the sampling error of all three summary inputs
//! by simulation: each draw perturbs `r_mar` and `TRR` on the log scale and
//! `S` on the identity scale, reruns the whole adjustment and keeps the
//! result. The interval is read off the empirical quantiles of the draws.
//!
//! [`plugin_ci`] treats `TRR` and `S` as exact and maps the bounds of the
//! `r_mar` interval through the (monotone) adjustment.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::adjust::{causal_from_marginal, HazardRatio};
use crate::error::{domain, Error, Result};
use crate::exec::{Executor, Sequential};
use crate::pvf::PvfFamily;
use crate::rng::stream_rng;
use crate::solver::{solve_with_hazard, FrailtySummary};
use crate::stats::{quantile_sorted, Z_975};

const S_CLAMP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Log,
    Identity,
}

/// A point estimate with its 95% confidence interval.
///
/// The interval is assumed symmetric on `scale`; `lo == value == hi` is
/// allowed and means the quantity is treated as known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryEstimate {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub scale: Scale,
}

impl SummaryEstimate {
    pub fn new(value: f64, lo: f64, hi: f64, scale: Scale) -> Result<Self> {
        if !(lo <= value && value <= hi) || !(lo.is_finite() && hi.is_finite()) {
            return Err(domain(format!(
                "estimate {value} must lie within its interval [{lo}, {hi}]"
            )));
        }
        if scale == Scale::Log && !(lo > 0.0) {
            return Err(domain(format!(
                "log-scale estimate needs a positive interval, got [{lo}, {hi}]"
            )));
        }
        Ok(SummaryEstimate {
            value,
            lo,
            hi,
            scale,
        })
    }

    pub fn log(value: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::new(value, lo, hi, Scale::Log)
    }

    pub fn identity(value: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::new(value, lo, hi, Scale::Identity)
    }

    /// A value treated as known.
    pub fn exact(value: f64, scale: Scale) -> Result<Self> {
        Self::new(value, value, value, scale)
    }

    /// Standard deviation on `scale`, from the lower half-width of the interval.
    pub fn sd(&self) -> f64 {
        match self.scale {
            Scale::Log => (self.value.ln() - self.lo.ln()) / Z_975,
            Scale::Identity => (self.value - self.lo) / Z_975,
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        let sd = self.sd();
        match self.scale {
            Scale::Log => (self.value.ln() + sd * z).exp(),
            Scale::Identity => self.value + sd * z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiConfig {
    pub n_draws: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for CiConfig {
    fn default() -> Self {
        CiConfig {
            n_draws: 10_000,
            alpha: 0.05,
            seed: 0,
        }
    }
}

impl CiConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_draws < 100 {
            return Err(Error::InvalidConfig(format!(
                "n_draws = {} must be at least 100",
                self.n_draws
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha = {} must lie in (0, 1)",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericCi {
    pub point: HazardRatio,
    pub lo: f64,
    pub hi: f64,
    pub n_failed: usize,
    /// Failure counts by [`Error::code`], most frequent first.
    pub failures: Vec<(&'static str, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PluginCi {
    pub point: HazardRatio,
    pub lo: f64,
    pub hi: f64,
}

fn adjust_once(family: PvfFamily, r_mar: f64, trr: f64, s: f64) -> Result<HazardRatio> {
    let summary = FrailtySummary::new(trr, s)?;
    let (params, h0) = solve_with_hazard(family, &summary)?;
    causal_from_marginal(&params, h0, HazardRatio::new(r_mar)?)
}

fn check_inputs(r_mar: &SummaryEstimate, trr: &SummaryEstimate, s: &SummaryEstimate) -> Result<()> {
    if r_mar.scale != Scale::Log || trr.scale != Scale::Log {
        return Err(domain("r_mar and TRR must be given on the log scale"));
    }
    if s.scale != Scale::Identity {
        return Err(domain("S(t1) must be given on the identity scale"));
    }
    Ok(())
}

/// Monte-Carlo confidence interval, run sequentially.
pub fn numeric_ci(
    family: PvfFamily,
    r_mar: &SummaryEstimate,
    trr: &SummaryEstimate,
    s: &SummaryEstimate,
    cfg: &CiConfig,
) -> Result<NumericCi> {
    numeric_ci_with(&Sequential, family, r_mar, trr, s, cfg)
}

/// Monte-Carlo confidence interval on the given executor.
///
/// Draw `i` uses ChaCha stream `i` of `cfg.seed`, so the result does not
/// depend on the executor. Failed draws are dropped and counted; more than
/// 20% failures is an error.
pub fn numeric_ci_with<E: Executor>(
    exec: &E,
    family: PvfFamily,
    r_mar: &SummaryEstimate,
    trr: &SummaryEstimate,
    s: &SummaryEstimate,
    cfg: &CiConfig,
) -> Result<NumericCi> {
    cfg.validate()?;
    family.validate()?;
    check_inputs(r_mar, trr, s)?;
    let point = adjust_once(family, r_mar.value, trr.value, s.value)?;

    let (r_mar, trr, s) = (*r_mar, *trr, *s);
    let seed = cfg.seed;
    let draws: Vec<Result<f64>> = exec.map_indexed(cfg.n_draws, move |i| {
        let mut rng = stream_rng(seed, i as u64);
        let rm = r_mar.draw(&mut rng);
        let tr = trr.draw(&mut rng);
        let sv = s.draw(&mut rng).clamp(S_CLAMP, 1.0 - S_CLAMP);
        adjust_once(family, rm, tr, sv).map(HazardRatio::value)
    });

    let mut ok = Vec::with_capacity(draws.len());
    let mut failures: Vec<(&'static str, usize)> = Vec::new();
    for d in draws {
        match d {
            Ok(v) => ok.push(v),
            Err(e) => match failures.iter_mut().find(|(code, _)| *code == e.code()) {
                Some((_, n)) => *n += 1,
                None => failures.push((e.code(), 1)),
            },
        }
    }
    failures.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let n_failed = cfg.n_draws - ok.len();
    if n_failed * 5 > cfg.n_draws {
        return Err(Error::TooManyFailures {
            unit: "draws",
            failed: n_failed,
            total: cfg.n_draws,
            dominant: failures.first().map_or("none", |f| f.0),
        });
    }
    ok.sort_unstable_by(f64::total_cmp);
    Ok(NumericCi {
        point,
        lo: quantile_sorted(&ok, cfg.alpha / 2.0),
        hi: quantile_sorted(&ok, 1.0 - cfg.alpha / 2.0),
        n_failed,
        failures,
    })
}

/// Plug-in interval: `TRR` and `S` fixed at their point values, `r_mar`
/// bounds mapped through the adjustment.
pub fn plugin_ci(family: PvfFamily, r_mar: &SummaryEstimate, trr: f64, s: f64) -> Result<PluginCi> {
    let summary = FrailtySummary::new(trr, s)?;
    let (params, h0) = solve_with_hazard(family, &summary)?;
    let map =
        |x: f64| causal_from_marginal(&params, h0, HazardRatio::new(x)?).map(HazardRatio::value);
    let point = HazardRatio::new(map(r_mar.value)?)?;
    let (a, b) = (map(r_mar.lo)?, map(r_mar.hi)?);
    Ok(PluginCi {
        point,
        lo: a.min(b),
        hi: a.max(b),
    })
}
