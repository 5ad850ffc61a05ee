//! Recovering the frailty parameter `nu` from twin-study summary data.
//!
//! For a fixed family, `S(t1)` and `nu` determine `H0(t1)`, and with it
//! `TRR(t1)`. The solver searches `ln nu` over `[ln 1e-8, ln 1e8]` for the
//! `nu` whose implied TRR matches the observed one.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::pvf::{CumulativeHazard, PvfFamily, PvfParams};
use crate::root::{find_root, Tolerance};

pub const NU_MIN: f64 = 1e-8;
pub const NU_MAX: f64 = 1e8;

const TOLERANCE: Tolerance = Tolerance {
    f_abs: 1e-15,
    x_width: 1e-12,
    max_iter: 200,
};

/// Twin recurrence risk and population survival at the same age `t1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrailtySummary {
    trr_t1: f64,
    s_t1: f64,
    t1: Option<f64>,
}

impl FrailtySummary {
    /// Validates `1 < trr <= 1 / s` and `0 < s < 1`.
    ///
    /// A TRR within `1e-12` of one means there is no frailty variance to
    /// recover and is reported as [`Error::Degenerate`].
    pub fn new(trr_t1: f64, s_t1: f64) -> Result<Self> {
        if !(s_t1 > 0.0 && s_t1 < 1.0) {
            return Err(domain(format!("S(t1) = {s_t1} must lie in (0, 1)")));
        }
        if !trr_t1.is_finite() {
            return Err(domain(format!("TRR(t1) = {trr_t1} must be finite")));
        }
        if trr_t1 <= 1.0 + 1e-12 {
            return Err(Error::Degenerate(format!(
                "TRR(t1) = {trr_t1} implies no frailty variance"
            )));
        }
        if trr_t1 > 1.0 / s_t1 {
            return Err(domain(format!(
                "TRR(t1) = {trr_t1} exceeds 1/S(t1) = {}",
                1.0 / s_t1
            )));
        }
        Ok(FrailtySummary {
            trr_t1,
            s_t1,
            t1: None,
        })
    }

    /// Attaches the age `t1` as a label; it plays no part in the calculations.
    pub fn at_time(mut self, t1: f64) -> Self {
        self.t1 = Some(t1);
        self
    }

    pub fn trr(&self) -> f64 {
        self.trr_t1
    }

    pub fn survival(&self) -> f64 {
        self.s_t1
    }

    pub fn t1(&self) -> Option<f64> {
        self.t1
    }
}

/// Residual whose root in `nu` is the solution.
///
/// Gamma: `S^2 TRR - (1 / (1 + 2 (1 - S^(1/nu)) / S^(1/nu)))^nu`.
/// Other families: `ln TRR - rho (1 - 2 (nu/(nu+H0))^m + (nu/(nu+2 H0))^m)`.
/// Both are evaluated in forms that stay finite over the whole search range.
pub fn residual(family: PvfFamily, summary: &FrailtySummary, nu: f64) -> Result<f64> {
    let params = PvfParams::new(family, nu)?;
    let s = summary.s_t1;
    if params.is_gamma() {
        // (1 / (1 + 2 (1 - u) / u))^nu = (u / (2 - u))^nu = S (2 - u)^-nu
        let u = (s.ln() / nu).exp();
        let matched = s * (-nu * (1.0 - u).ln_1p()).exp();
        Ok(s * s * summary.trr_t1 - matched)
    } else {
        Ok(summary.trr_t1.ln() - params.ln_trr_at_survival(s)?)
    }
}

/// Finds the `PvfParams` of `family` reproducing `summary`.
pub fn solve_nu(family: PvfFamily, summary: &FrailtySummary) -> Result<PvfParams> {
    family.validate()?;
    if summary.s_t1 <= family.survival_floor() {
        return Err(domain(format!(
            "S(t1) = {} is not above the non-susceptible fraction {}",
            summary.s_t1,
            family.survival_floor()
        )));
    }
    let f = |ln_nu: f64| residual(family, summary, ln_nu.exp()).unwrap_or(f64::NAN);
    let root = find_root(f, NU_MIN.ln(), NU_MAX.ln(), TOLERANCE).map_err(|e| match e {
        Error::NoRoot {
            f_lower, f_upper, ..
        } => Error::NoRoot {
            lower: NU_MIN,
            upper: NU_MAX,
            f_lower,
            f_upper,
        },
        other => other,
    })?;
    PvfParams::new(family, root.x.exp())
}

/// `solve_nu` together with the implied `H0(t1)`.
pub fn solve_with_hazard(
    family: PvfFamily,
    summary: &FrailtySummary,
) -> Result<(PvfParams, CumulativeHazard)> {
    let params = solve_nu(family, summary)?;
    let h0 = params.invert_survival(summary.s_t1)?;
    Ok((params, h0))
}

/// Sign pattern of the residual over a log-spaced grid of `nu`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualScan {
    pub nu: Vec<f64>,
    pub residual: Vec<f64>,
    pub sign_changes: usize,
    pub monotone: bool,
}

impl ResidualScan {
    /// More than one sign change, or a non-monotone residual, suggests the
    /// root returned by [`solve_nu`] may not be unique.
    pub fn suspect_multiple_roots(&self) -> bool {
        self.sign_changes > 1 || !self.monotone
    }
}

/// Evaluates the residual on `points` log-spaced values of `nu` in the
/// search range.
pub fn scan_residual(
    family: PvfFamily,
    summary: &FrailtySummary,
    points: usize,
) -> Result<ResidualScan> {
    let points = points.max(2);
    let (lo, hi) = (NU_MIN.ln(), NU_MAX.ln());
    let mut nu = Vec::with_capacity(points);
    let mut res = Vec::with_capacity(points);
    for i in 0..points {
        let x = (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp();
        nu.push(x);
        res.push(residual(family, summary, x)?);
    }
    let sign_changes = res
        .windows(2)
        .filter(|w| w[0] != 0.0 && w[1] != 0.0 && w[0].signum() != w[1].signum())
        .count();
    // Rounding noise on the plateaus is not a change of direction.
    let noise = 1e-9 * res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let increasing = res.windows(2).all(|w| w[1] >= w[0] - noise);
    let decreasing = res.windows(2).all(|w| w[1] <= w[0] + noise);
    Ok(ResidualScan {
        nu,
        residual: res,
        sign_changes,
        monotone: increasing || decreasing,
    })
}
