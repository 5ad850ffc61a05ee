//! Instrumental-variable (Mendelian randomization) effect per unit of exposure.
//!
//! If the instrument shifts the exposure by `b_g` per unit of `g`, a
//! frailty-adjusted hazard ratio between instrument levels `g1` and `g2`
//! converts to a log hazard ratio per exposure unit
//!
//! ```text
//! beta_a = ln(HR_g) / (b_g (g1 - g2)).
//! ```
//!
//! The interval maps the bounds of `HR_g` through the same formula; the
//! uncertainty in `b_g` is not propagated.

use alloc::format;

use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::uncertainty::{Scale, SummaryEstimate};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvInput {
    /// Frailty-adjusted hazard ratio between instrument levels `g1` and `g2`.
    pub adjusted_hr: SummaryEstimate,
    /// Change in exposure per unit of instrument.
    pub b_g: f64,
    pub g1: f64,
    pub g2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvEstimate {
    pub beta_a: f64,
    pub beta_lo: f64,
    pub beta_hi: f64,
    pub hr_per_unit: f64,
    pub lo: f64,
    pub hi: f64,
}

pub fn iv_estimate(input: &IvInput) -> Result<IvEstimate> {
    let hr = &input.adjusted_hr;
    if hr.scale != Scale::Log {
        return Err(domain(
            "the instrument hazard ratio must be on the log scale",
        ));
    }
    let denom = input.b_g * (input.g1 - input.g2);
    if !denom.is_finite() || denom.abs() < 1e-12 {
        return Err(Error::DegenerateInstrument);
    }
    let beta = |x: f64| x.ln() / denom;
    let beta_a = beta(hr.value);
    let (a, b) = (beta(hr.lo), beta(hr.hi));
    let (beta_lo, beta_hi) = (a.min(b), a.max(b));
    Ok(IvEstimate {
        beta_a,
        beta_lo,
        beta_hi,
        hr_per_unit: beta_a.exp(),
        lo: beta_lo.exp(),
        hi: beta_hi.exp(),
    })
}

/// Least-squares slope of exposure `a` on instrument `g`, with its standard error.
///
/// `data` holds `(g, a)` pairs. For a binary instrument the slope is the
/// difference in mean exposure between the two levels.
pub fn instrument_strength(data: &[(f64, f64)]) -> Result<(f64, f64)> {
    let n = data.len();
    if n < 3 {
        return Err(domain(format!(
            "instrument strength needs at least 3 observations, got {n}"
        )));
    }
    let nf = n as f64;
    let g_mean = data.iter().map(|p| p.0).sum::<f64>() / nf;
    let a_mean = data.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sgg, mut sga) = (0.0, 0.0);
    for &(g, a) in data {
        sgg += (g - g_mean) * (g - g_mean);
        sga += (g - g_mean) * (a - a_mean);
    }
    if !(sgg > 0.0) {
        return Err(Error::SingularDesign);
    }
    let slope = sga / sgg;
    let intercept = a_mean - slope * g_mean;
    let rss: f64 = data
        .iter()
        .map(|&(g, a)| {
            let e = a - intercept - slope * g;
            e * e
        })
        .sum();
    let se = (rss / (nf - 2.0) / sgg).sqrt();
    Ok((slope, se))
}
