//! Power variance function (PVF) frailty family.
//!
//! All members are standardised to `E(U) = 1`. With shape `m > -1`,
//! `nu > 0` and `rho = nu / m`, the Laplace transform is
//!
//! ```text
//! L(c) = exp(-rho * (1 - (nu / (nu + c))^m)),   Var(U) = (m + 1) / nu.
//! ```
//!
//! The gamma distribution is the `m -> 0` limit, `L(c) = (nu / (nu + c))^nu`.
//! It gets its own code path because the general expression is `0/0` there.
//! Population survival is `S(t) = L(H0(t))` and the twin recurrence risk is
//! `TRR(t) = L(2 H0) / L(H0)^2`.

use alloc::format;

use num_traits::Float;

use crate::error::{domain, Result};

/// Choice of frailty distribution within the PVF family.
///
/// `Hougaard` carries its fixed shape `m` in `(-1, 0)`; `CompoundPoisson`
/// carries the non-susceptible fraction `q = P(U = 0)` in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PvfFamily {
    Gamma,
    InverseGaussian,
    Hougaard { m: f64 },
    CompoundPoisson { nonsusceptible: f64 },
}

impl PvfFamily {
    pub fn hougaard(m: f64) -> Result<Self> {
        let family = PvfFamily::Hougaard { m };
        family.validate()?;
        Ok(family)
    }

    pub fn compound_poisson(nonsusceptible: f64) -> Result<Self> {
        let family = PvfFamily::CompoundPoisson { nonsusceptible };
        family.validate()?;
        Ok(family)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PvfFamily::Hougaard { m } if !(m > -1.0 && m < 0.0) => Err(domain(format!(
                "Hougaard shape m = {m} must lie in (-1, 0)"
            ))),
            PvfFamily::CompoundPoisson { nonsusceptible: q } if !(q > 0.0 && q < 1.0) => {
                Err(domain(format!(
                    "non-susceptible fraction q = {q} must lie in (0, 1)"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PvfFamily::Gamma => "gamma",
            PvfFamily::InverseGaussian => "inverse-gaussian",
            PvfFamily::Hougaard { .. } => "hougaard",
            PvfFamily::CompoundPoisson { .. } => "compound-poisson",
        }
    }

    /// Lowest population survival the family can reach (`q` for compound Poisson).
    pub fn survival_floor(&self) -> f64 {
        match *self {
            PvfFamily::CompoundPoisson { nonsusceptible } => nonsusceptible,
            _ => 0.0,
        }
    }
}

/// Cumulative baseline hazard `H0(t)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CumulativeHazard(f64);

impl CumulativeHazard {
    pub const ZERO: CumulativeHazard = CumulativeHazard(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value >= 0.0 {
            Ok(CumulativeHazard(value))
        } else {
            Err(domain(format!("cumulative hazard {value} must be >= 0")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Parameters of a PVF frailty distribution with unit mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvfParams {
    family: PvfFamily,
    nu: f64,
    rho: f64,
    m: f64,
}

impl PvfParams {
    /// Builds the member of `family` with the given `nu`; `rho` and `m` follow
    /// from the family and the unit-mean constraint `m * rho / nu = 1`.
    pub fn new(family: PvfFamily, nu: f64) -> Result<Self> {
        family.validate()?;
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(domain(format!("nu = {nu} must be positive and finite")));
        }
        let (rho, m) = match family {
            PvfFamily::Gamma => (f64::INFINITY, 0.0),
            PvfFamily::InverseGaussian => (nu / -0.5, -0.5),
            PvfFamily::Hougaard { m } => (nu / m, m),
            PvfFamily::CompoundPoisson { nonsusceptible } => {
                let rho = -nonsusceptible.ln();
                (rho, nu / rho)
            }
        };
        Ok(PvfParams { family, nu, rho, m })
    }

    /// No unobserved heterogeneity: `U = 1` almost surely (`nu = inf`).
    pub fn no_frailty() -> Self {
        PvfParams {
            family: PvfFamily::Gamma,
            nu: f64::INFINITY,
            rho: f64::INFINITY,
            m: 0.0,
        }
    }

    /// The member of `family` with `Var(U) = variance`.
    ///
    /// Compound Poisson frailties cannot have variance at or below `1 / rho`.
    pub fn with_variance(family: PvfFamily, variance: f64) -> Result<Self> {
        family.validate()?;
        if !(variance > 0.0) || !variance.is_finite() {
            return Err(domain(format!(
                "variance {variance} must be positive and finite"
            )));
        }
        let nu = match family {
            PvfFamily::Gamma => 1.0 / variance,
            PvfFamily::InverseGaussian => 0.5 / variance,
            PvfFamily::Hougaard { m } => (m + 1.0) / variance,
            PvfFamily::CompoundPoisson { nonsusceptible } => {
                let min_var = 1.0 / -nonsusceptible.ln();
                if variance <= min_var {
                    return Err(domain(format!(
                        "compound Poisson variance must exceed 1/rho = {min_var}, got {variance}"
                    )));
                }
                1.0 / (variance - min_var)
            }
        };
        PvfParams::new(family, nu)
    }

    pub fn family(&self) -> PvfFamily {
        self.family
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// `rho = nu / m`; infinite for gamma.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Shape `m`; zero for gamma.
    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn is_gamma(&self) -> bool {
        matches!(self.family, PvfFamily::Gamma)
    }

    /// True when `Var(U) = 0`.
    pub fn is_degenerate(&self) -> bool {
        self.nu.is_infinite()
    }

    pub fn variance(&self) -> f64 {
        (self.m + 1.0) / self.nu
    }

    /// `1 - (nu / (nu + c))^m`, accurate for small `m` and small `c / nu`.
    fn one_minus_pow(&self, c: f64) -> f64 {
        -(-self.m * (c / self.nu).ln_1p()).exp_m1()
    }

    /// `ln L(c)`.
    fn ln_laplace(&self, c: f64) -> f64 {
        if c == 0.0 {
            return 0.0;
        }
        if self.is_degenerate() {
            -c
        } else if self.is_gamma() {
            -self.nu * (c / self.nu).ln_1p()
        } else {
            -self.rho * self.one_minus_pow(c)
        }
    }

    /// Laplace transform `L(c) = E[exp(-c U)]`.
    pub fn laplace(&self, c: f64) -> Result<f64> {
        if !(c >= 0.0) {
            return Err(domain(format!("Laplace argument {c} must be >= 0")));
        }
        Ok(self.ln_laplace(c).exp())
    }

    /// Population survival `S = L(H0)`.
    pub fn survival(&self, h0: CumulativeHazard) -> f64 {
        self.ln_laplace(h0.value()).exp()
    }

    /// The cumulative baseline hazard at which population survival equals `s`.
    pub fn invert_survival(&self, s: f64) -> Result<CumulativeHazard> {
        if !(s > 0.0 && s < 1.0) {
            return Err(domain(format!("survival {s} must lie in (0, 1)")));
        }
        let ln_s = s.ln();
        let h = if self.is_degenerate() {
            -ln_s
        } else if self.is_gamma() {
            self.nu * (-ln_s / self.nu).exp_m1()
        } else {
            let ratio = ln_s / self.rho;
            if !(ratio > -1.0) {
                return Err(domain(format!(
                    "survival {s} is at or below the non-susceptible fraction {}",
                    self.family.survival_floor()
                )));
            }
            // w = (nu / (nu + H))^m = 1 + ln(s) / rho
            let ln_w = ratio.ln_1p();
            self.nu * (-ln_w / self.m).exp_m1()
        };
        CumulativeHazard::new(h)
    }

    /// `ln TRR` at cumulative hazard `h0`.
    pub fn ln_trr(&self, h0: CumulativeHazard) -> f64 {
        let h = h0.value();
        if h == 0.0 || self.is_degenerate() {
            return 0.0;
        }
        let x = h / self.nu;
        // (1 + x)^2 / (1 + 2x) = 1 + x^2 / (1 + 2x)
        let excess = (x * x / (1.0 + 2.0 * x)).ln_1p();
        if self.is_gamma() {
            return self.nu * excess;
        }
        // 1 - 2A + B with A = (1+x)^-m, B = (1+2x)^-m, rewritten as
        // (1 - A)^2 + A^2 (B / A^2 - 1) to avoid cancellation near h = 0.
        let one_minus_a = self.one_minus_pow(h);
        let a = 1.0 - one_minus_a;
        self.rho * (one_minus_a * one_minus_a + a * a * (self.m * excess).exp_m1())
    }

    /// Twin recurrence risk `L(2 H0) / L(H0)^2`.
    pub fn trr(&self, h0: CumulativeHazard) -> f64 {
        self.ln_trr(h0).exp()
    }

    /// `ln TRR` at the time where population survival is `s`.
    ///
    /// Same quantity as `ln_trr(invert_survival(s))`, written in terms of `s`
    /// directly so that it stays finite when `H0` overflows (very small `nu`).
    pub fn ln_trr_at_survival(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s < 1.0) {
            return Err(domain(format!("survival {s} must lie in (0, 1)")));
        }
        let ln_s = s.ln();
        if self.is_degenerate() {
            return Ok(0.0);
        }
        if self.is_gamma() {
            // u = nu / (nu + H0) = s^(1/nu);  ln TRR = -ln s - nu ln(2 - u)
            let u = (ln_s / self.nu).exp();
            return Ok(-ln_s - self.nu * (1.0 - u).ln_1p());
        }
        let ratio = ln_s / self.rho;
        if !(ratio > -1.0) {
            return Err(domain(format!(
                "survival {s} is at or below the non-susceptible fraction {}",
                self.family.survival_floor()
            )));
        }
        // u = nu / (nu + H0) = w^(1/m), w = 1 + ln(s) / rho
        let u = (ratio.ln_1p() / self.m).exp();
        Ok(-ln_s + (self.rho + ln_s) * (-self.m * (1.0 - u).ln_1p()).exp_m1())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn families_at_unit_variance() -> [PvfParams; 4] {
        [
            PvfParams::with_variance(PvfFamily::Gamma, 1.0).unwrap(),
            PvfParams::with_variance(PvfFamily::InverseGaussian, 1.0).unwrap(),
            PvfParams::with_variance(PvfFamily::hougaard(-0.125).unwrap(), 1.0).unwrap(),
            PvfParams::with_variance(PvfFamily::compound_poisson(0.1).unwrap(), 1.0).unwrap(),
        ]
    }

    #[test]
    fn gamma_laplace_at_one() {
        let p = PvfParams::new(PvfFamily::Gamma, 1.0).unwrap();
        assert!((p.laplace(1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn laplace_at_zero_is_one() {
        for p in families_at_unit_variance() {
            assert_eq!(p.laplace(0.0).unwrap(), 1.0);
            assert_eq!(p.survival(CumulativeHazard::ZERO), 1.0);
        }
    }

    #[test]
    fn laplace_rejects_negative_argument() {
        let p = PvfParams::new(PvfFamily::Gamma, 1.0).unwrap();
        assert!(matches!(p.laplace(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn unit_mean_constraint() {
        for p in families_at_unit_variance().iter().skip(1) {
            assert!(rel(p.m() * p.rho() / p.nu(), 1.0) < 1e-12, "{p:?}");
            assert!(rel(p.variance(), 1.0) < 1e-12);
        }
    }

    #[test]
    fn compound_poisson_unit_variance_matches_closed_form() {
        let rho = -(0.1f64).ln();
        let p = PvfParams::with_variance(PvfFamily::compound_poisson(0.1).unwrap(), 1.0).unwrap();
        assert!(rel(p.nu(), 1.0 / (rho - 1.0) + 1.0) < 1e-14);
        assert!(rel(p.m(), 1.0 / (rho - 1.0)) < 1e-14);
        assert!(rel(p.rho(), rho) < 1e-15);
    }

    #[test]
    fn variance_examples() {
        assert!(
            rel(
                PvfParams::new(PvfFamily::Gamma, 1.0 / 9.0)
                    .unwrap()
                    .variance(),
                9.0
            ) < 1e-14
        );
        assert_eq!(
            PvfParams::new(PvfFamily::InverseGaussian, 0.5)
                .unwrap()
                .variance(),
            1.0
        );
    }

    #[test]
    fn scenario_one_survival_and_trr() {
        // nu = 1/9, h0 = 0.002 per year, t1 = 50
        let p = PvfParams::new(PvfFamily::Gamma, 1.0 / 9.0).unwrap();
        let h = CumulativeHazard::new(0.1).unwrap();
        assert!((p.survival(h) - 0.931).abs() < 5e-4);
        assert!((p.trr(h) - 1.029).abs() < 5e-4);
        let back = p.invert_survival(p.survival(h)).unwrap();
        assert!(rel(back.value(), 0.1) < 1e-12);
        assert!(rel(p.invert_survival(0.931).unwrap().value(), 0.1) < 0.01);
    }

    #[test]
    fn trr_round_trip_at_example_nu() {
        let p = PvfParams::new(PvfFamily::Gamma, 0.846).unwrap();
        let h = p.invert_survival(0.56).unwrap();
        assert!((p.trr(h) - 1.27).abs() < 1e-3);
    }

    #[test]
    fn compound_poisson_survival_floor() {
        let p = PvfParams::new(PvfFamily::compound_poisson(0.1).unwrap(), 0.7).unwrap();
        let s = p.survival(CumulativeHazard::new(1e40).unwrap());
        assert!((s - 0.1).abs() < 1e-6);
        assert!(matches!(p.invert_survival(0.1), Err(Error::Domain(_))));
        assert!(matches!(p.invert_survival(0.05), Err(Error::Domain(_))));
        assert!(p.invert_survival(0.1001).is_ok());
    }

    #[test]
    fn invert_survival_rejects_out_of_range() {
        let p = PvfParams::new(PvfFamily::Gamma, 1.0).unwrap();
        for s in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(p.invert_survival(s).is_err(), "{s}");
        }
        assert!(p.invert_survival(1.0 - 1e-12).unwrap().value() < 1e-11);
    }

    #[test]
    fn hougaard_round_trip() {
        let p = PvfParams::new(PvfFamily::hougaard(-0.125).unwrap(), 2.0).unwrap();
        let h = p.invert_survival(0.7).unwrap();
        assert!(rel(p.survival(h), 0.7) < 1e-10);
    }

    #[test]
    fn trr_is_one_at_origin() {
        for p in families_at_unit_variance() {
            assert_eq!(p.trr(CumulativeHazard::ZERO), 1.0);
        }
    }

    #[test]
    fn ln_trr_at_survival_matches_hazard_route() {
        for p in families_at_unit_variance() {
            for s in [0.95, 0.7, 0.5, 0.2] {
                if s <= p.family().survival_floor() {
                    continue;
                }
                let via_h = p.ln_trr(p.invert_survival(s).unwrap());
                let direct = p.ln_trr_at_survival(s).unwrap();
                assert!(
                    rel(direct, via_h) < 1e-10,
                    "{p:?} s={s}: {direct} vs {via_h}"
                );
            }
        }
    }

    #[test]
    fn ln_trr_at_survival_is_finite_for_extreme_nu() {
        for family in [
            PvfFamily::Gamma,
            PvfFamily::InverseGaussian,
            PvfFamily::hougaard(-0.125).unwrap(),
            PvfFamily::compound_poisson(0.1).unwrap(),
        ] {
            for nu in [1e-8, 1e8] {
                let p = PvfParams::new(family, nu).unwrap();
                assert!(
                    p.ln_trr_at_survival(0.56).unwrap().is_finite(),
                    "{family:?} {nu}"
                );
            }
        }
    }

    #[test]
    fn no_frailty_is_exponential() {
        let p = PvfParams::no_frailty();
        assert_eq!(p.variance(), 0.0);
        let h = CumulativeHazard::new(0.3).unwrap();
        assert!(rel(p.survival(h), (-0.3f64).exp()) < 1e-15);
        assert_eq!(p.trr(h), 1.0);
        assert!(rel(p.invert_survival(0.5).unwrap().value(), 2f64.ln()) < 1e-15);
    }

    #[test]
    fn family_validation() {
        assert!(PvfFamily::hougaard(0.0).is_err());
        assert!(PvfFamily::hougaard(-1.0).is_err());
        assert!(PvfFamily::compound_poisson(0.0).is_err());
        assert!(PvfFamily::compound_poisson(1.0).is_err());
        assert!(PvfParams::new(PvfFamily::Gamma, 0.0).is_err());
        assert!(PvfParams::with_variance(PvfFamily::compound_poisson(0.1).unwrap(), 0.4).is_err());
    }
}
