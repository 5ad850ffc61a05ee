use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Gamma, Open01};

use crate::error::{domain, Result};

/// One simulated subject who entered follow-up at `entry`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Individual {
    pub frailty: f64,
    pub exposed: bool,
    pub event_time: f64,
    pub entry: f64,
    /// Time from entry to event or censoring, in `(0, delta]`.
    pub observed_time: f64,
    pub event: bool,
}

fn frailty_distribution(nu: f64) -> Result<Gamma<f64>> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(domain(format!("nu = {nu} must be positive and finite")));
    }
    Gamma::new(nu, 1.0 / nu).map_err(|e| domain(format!("gamma frailty with nu = {nu}: {e}")))
}

/// `n` frailties with mean 1 and variance `1 / nu` (shape `nu`, scale `1 / nu`).
pub fn sample_frailty_gamma<R: Rng + ?Sized>(nu: f64, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    let dist = frailty_distribution(nu)?;
    Ok((0..n).map(|_| dist.sample(rng)).collect())
}

/// Exponential event time with rate `h0 * u * r`, by inversion.
pub fn sample_event_time<R: Rng + ?Sized>(u: f64, h0: f64, r: f64, rng: &mut R) -> f64 {
    let w: f64 = rng.sample(Open01);
    -w.ln() / (h0 * u * r)
}

/// Draws `n` subjects with hazard `h0 * U * r` and keeps those still alive
/// at `t1`, censoring their follow-up at `delta` years after `t1`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_cohort<R: Rng + ?Sized>(
    n: usize,
    nu: f64,
    h0: f64,
    r: f64,
    exposed: bool,
    t1: f64,
    delta: f64,
    rng: &mut R,
) -> Result<Vec<Individual>> {
    let dist = frailty_distribution(nu)?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let u = dist.sample(rng);
        let t = sample_event_time(u, h0, r, rng);
        if t > t1 {
            let since = t - t1;
            let event = since < delta;
            out.push(Individual {
                frailty: u,
                exposed,
                event_time: t,
                entry: t1,
                observed_time: if event { since } else { delta },
                event,
            });
        }
    }
    Ok(out)
}

/// Survival to `t1` of `n` twin pairs sharing a frailty, as
/// `(index twin, co-twin)` with the index twin chosen at random.
pub fn simulate_twin_pairs<R: Rng + ?Sized>(
    n: usize,
    nu: f64,
    h0: f64,
    t1: f64,
    rng: &mut R,
) -> Result<Vec<(bool, bool)>> {
    let dist = frailty_distribution(nu)?;
    Ok((0..n)
        .map(|_| {
            let u = dist.sample(rng);
            let a = sample_event_time(u, h0, 1.0, rng) > t1;
            let b = sample_event_time(u, h0, 1.0, rng) > t1;
            if rng.random::<bool>() {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect())
}

/// Survival to `t1` of `n` independent unexposed subjects.
pub fn simulate_survey<R: Rng + ?Sized>(
    n: usize,
    nu: f64,
    h0: f64,
    t1: f64,
    rng: &mut R,
) -> Result<Vec<bool>> {
    let dist = frailty_distribution(nu)?;
    Ok((0..n)
        .map(|_| sample_event_time(dist.sample(rng), h0, 1.0, rng) > t1)
        .collect())
}
