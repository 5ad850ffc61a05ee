//! Marginal (among survivors) versus causal (conditional on frailty) hazard ratios.
//!
//! With constant causal hazard ratio `r` and `a = H0(t) / nu`, the hazard
//! ratio among those still alive at `t` is
//!
//! ```text
//! r_mar(t) = r * ((1 + a) / (1 + r a))^(m + 1).
//! ```
//!
//! Inverting it is closed form for gamma (`m = 0`) and inverse Gaussian
//! (`m = -1/2`, a quadratic); other members are solved numerically.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::pvf::{CumulativeHazard, PvfFamily, PvfParams};
use crate::root::{find_root, Tolerance};
use crate::solver::{solve_nu, FrailtySummary};

const R_MIN: f64 = 1e-6;
const R_MAX: f64 = 1e6;

const TOLERANCE: Tolerance = Tolerance {
    f_abs: 1e-15,
    x_width: 1e-13,
    max_iter: 200,
};

/// A positive rate ratio.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct HazardRatio(f64);

impl HazardRatio {
    pub const ONE: HazardRatio = HazardRatio(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(HazardRatio(value))
        } else {
            Err(domain(format!(
                "hazard ratio {value} must be positive and finite"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `ln r_mar` for shape `m`, `nu` and cumulative hazard `h`.
fn ln_marginal(nu: f64, m: f64, h: f64, r: f64) -> f64 {
    let a = h / nu;
    r.ln() + (m + 1.0) * (a.ln_1p() - (r * a).ln_1p())
}

/// The hazard ratio among survivors at cumulative hazard `h0`.
pub fn marginal_from_causal(
    params: &PvfParams,
    h0: CumulativeHazard,
    r: HazardRatio,
) -> HazardRatio {
    if params.is_degenerate() || h0.value() == 0.0 || r.0 == 1.0 {
        return r;
    }
    HazardRatio(ln_marginal(params.nu(), params.m(), h0.value(), r.0).exp())
}

/// The causal hazard ratio producing `r_mar` among survivors at `h0`.
pub fn causal_from_marginal(
    params: &PvfParams,
    h0: CumulativeHazard,
    r_mar: HazardRatio,
) -> Result<HazardRatio> {
    if params.is_degenerate() || h0.value() == 0.0 || r_mar.0 == 1.0 {
        return Ok(r_mar);
    }
    let a = h0.value() / params.nu();
    let rm = r_mar.0;
    let r = match params.family() {
        PvfFamily::Gamma => {
            let denom = 1.0 + a - a * rm;
            if !(denom > 0.0) {
                return Err(Error::OutOfRange {
                    r_mar: rm,
                    reason: format!("gamma attenuation limit is {}", (1.0 + a) / a),
                });
            }
            rm / denom
        }
        PvfFamily::InverseGaussian => {
            // r^2 (1 + a) - r rm^2 a - rm^2 = 0; the roots have product < 0.
            let qa = 1.0 + a;
            let qb = rm * rm * a;
            let qc = rm * rm;
            (qb + (qb * qb + 4.0 * qa * qc).sqrt()) / (2.0 * qa)
        }
        _ => causal_from_marginal_numeric(params.nu(), params.m(), h0.value(), rm)?,
    };
    HazardRatio::new(r)
}

/// Solves `r_mar^(1/(m+1)) (1 + H0 r / nu) = r^(1/(m+1)) (1 + H0 / nu)` for `r`
/// by bracketed search in `ln r` over `[1e-6, 1e6]`.
///
/// For `m > 0` the marginal ratio peaks at `r = nu / (m H0)`; the search is
/// confined to the increasing branch below the peak, which is the branch that
/// meets `r_mar = r` as `H0 -> 0`.
pub fn causal_from_marginal_numeric(nu: f64, m: f64, h0: f64, r_mar: f64) -> Result<f64> {
    if !(m > -1.0) || !(nu > 0.0) || !(h0 >= 0.0) || !(r_mar > 0.0) {
        return Err(domain(format!(
            "invalid arguments nu={nu}, m={m}, h0={h0}, r_mar={r_mar}"
        )));
    }
    let mut upper = R_MAX;
    if m > 0.0 && h0 > 0.0 {
        upper = upper.min(nu / (m * h0));
    }
    let target = r_mar.ln();
    let f = |ln_r: f64| ln_marginal(nu, m, h0, ln_r.exp()) - target;
    match find_root(f, R_MIN.ln(), upper.ln(), TOLERANCE) {
        Ok(root) => Ok(root.x.exp()),
        Err(Error::NoRoot { .. }) => Err(Error::OutOfRange {
            r_mar,
            reason: format!("no causal ratio in [{R_MIN:e}, {upper:e}] gives this marginal ratio"),
        }),
        Err(e) => Err(e),
    }
}

/// Causal hazard ratio evaluated at the median event time, where population
/// survival is `s_median` (one half by default). Gamma frailty only.
pub fn causal_from_marginal_at_median(
    params: &PvfParams,
    s_median: Option<f64>,
    r_mar: HazardRatio,
) -> Result<HazardRatio> {
    if !params.is_gamma() {
        return Err(Error::UnsupportedFamily(params.family().name()));
    }
    let h0 = params.invert_survival(s_median.unwrap_or(0.5))?;
    causal_from_marginal(params, h0, r_mar)
}

/// Limit of the marginal ratio as `t -> inf`: `r^(-m)`, which is 1 for gamma.
pub fn asymptotic_marginal(params: &PvfParams, r: HazardRatio) -> HazardRatio {
    if params.is_gamma() {
        return HazardRatio::ONE;
    }
    HazardRatio((-params.m() * r.0.ln()).exp())
}

/// One row of a curve. `value` is `None` when the point could not be computed.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Curve {
    pub points: Vec<CurvePoint>,
    pub warnings: Vec<String>,
}

impl Curve {
    pub fn values(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().filter_map(|p| p.value.map(|v| (p.x, v)))
    }
}

/// Marginal hazard ratio as a function of the surviving population fraction
/// for a frailty of the given variance and a fixed causal ratio `r`.
pub fn hazard_ratio_curve(
    family: PvfFamily,
    variance: f64,
    r: HazardRatio,
    grid: &[f64],
) -> Result<Curve> {
    let params = PvfParams::with_variance(family, variance)?;
    let mut curve = Curve::default();
    for &s in grid {
        if !(s > 0.0 && s <= 1.0) {
            return Err(domain(format!("survival grid value {s} outside (0, 1]")));
        }
        let value = if s == 1.0 {
            Some(r.0)
        } else {
            match params.invert_survival(s) {
                Ok(h) => Some(marginal_from_causal(&params, h, r).0),
                Err(e) => {
                    curve.warnings.push(format!("s={s}: {e}"));
                    None
                }
            }
        };
        curve.points.push(CurvePoint { x: s, value });
    }
    Ok(curve)
}

/// Causal hazard ratio implied by a fixed marginal ratio as the twin
/// recurrence risk varies, at population survival `s_t1`.
pub fn trr_sensitivity_curve(
    family: PvfFamily,
    s_t1: f64,
    r_mar: HazardRatio,
    trr_grid: &[f64],
) -> Result<Curve> {
    family.validate()?;
    let mut curve = Curve::default();
    for &trr in trr_grid {
        let point = FrailtySummary::new(trr, s_t1).and_then(|summary| {
            let params = solve_nu(family, &summary)?;
            let h0 = params.invert_survival(s_t1)?;
            causal_from_marginal(&params, h0, r_mar)
        });
        let value = match point {
            Ok(r) => Some(r.0),
            Err(e) => {
                curve.warnings.push(format!("trr={trr}: {e}"));
                None
            }
        };
        curve.points.push(CurvePoint { x: trr, value });
    }
    Ok(curve)
}
