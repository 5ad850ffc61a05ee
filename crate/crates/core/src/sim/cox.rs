//! Cox proportional-hazards fit for a single binary covariate.
//!
//! With one 0/1 covariate the Breslow partial likelihood depends on the data
//! only through, at each distinct event time, the number of events `d`, the
//! number of exposed events `d1` and the risk-set sizes `n0`, `n1`:
//!
//! ```text
//! l(b) = sum d1 b - d ln(n0 + n1 e^b)
//! ```

use alloc::vec::Vec;

use num_traits::Float;

use super::Individual;
use crate::error::{Error, Result};
use crate::stats::Z_975;

const MAX_ITER: usize = 50;
const MAX_HALVINGS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoxFit {
    pub log_hr: f64,
    pub se: f64,
    pub hr: f64,
    pub lo: f64,
    pub hi: f64,
    pub n_events: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
struct EventTime {
    d: f64,
    d1: f64,
    n0: f64,
    n1: f64,
}

fn event_table(sample: &[Individual]) -> Vec<EventTime> {
    let mut order: Vec<&Individual> = sample.iter().collect();
    order.sort_unstable_by(|a, b| a.observed_time.total_cmp(&b.observed_time));
    let mut n1 = sample.iter().filter(|i| i.exposed).count() as f64;
    let mut n0 = sample.len() as f64 - n1;
    let mut table = Vec::new();
    let mut k = 0;
    while k < order.len() {
        let t = order[k].observed_time;
        let mut end = k;
        let (mut d, mut d1, mut left0, mut left1) = (0.0, 0.0, 0.0, 0.0);
        while end < order.len() && order[end].observed_time == t {
            let i = order[end];
            if i.event {
                d += 1.0;
                if i.exposed {
                    d1 += 1.0;
                }
            }
            if i.exposed {
                left1 += 1.0;
            } else {
                left0 += 1.0;
            }
            end += 1;
        }
        if d > 0.0 {
            table.push(EventTime { d, d1, n0, n1 });
        }
        n0 -= left0;
        n1 -= left1;
        k = end;
    }
    table
}

/// Log partial likelihood, score and information at `beta`.
fn evaluate(table: &[EventTime], beta: f64) -> (f64, f64, f64) {
    let eb = beta.exp();
    let (mut ll, mut score, mut info) = (0.0, 0.0, 0.0);
    for e in table {
        let denom = e.n0 + e.n1 * eb;
        let p = e.n1 * eb / denom;
        ll += e.d1 * beta - e.d * denom.ln();
        score += e.d1 - e.d * p;
        info += e.d * p * (1.0 - p);
    }
    (ll, score, info)
}

/// Newton-Raphson from `beta = 0` with step halving, Breslow ties.
///
/// Fails with [`Error::NoEvents`] without events and [`Error::Separation`]
/// when the likelihood is monotone, so the estimate would be infinite.
pub fn fit_cox_binary(sample: &[Individual]) -> Result<CoxFit> {
    let n_events = sample.iter().filter(|i| i.event).count();
    if n_events == 0 {
        return Err(Error::NoEvents);
    }
    let table = event_table(sample);
    if is_monotone(&table) {
        return Err(Error::Separation);
    }

    let mut beta = 0.0;
    let (mut ll, mut score, mut info) = evaluate(&table, beta);
    for iter in 1..=MAX_ITER {
        if score.abs() < 1e-10 {
            return finish(beta, info, n_events, iter - 1);
        }
        if !(info > 0.0) {
            return Err(Error::NonConvergence { iterations: iter });
        }
        let mut step = score / info;
        let mut next = evaluate(&table, beta + step);
        let mut halvings = 0;
        while !(next.0 >= ll) && halvings < MAX_HALVINGS {
            step *= 0.5;
            next = evaluate(&table, beta + step);
            halvings += 1;
        }
        beta += step;
        (ll, score, info) = next;
        if step.abs() < 1e-12 {
            return finish(beta, info, n_events, iter);
        }
    }
    if score.abs() < 1e-10 {
        return finish(beta, info, n_events, MAX_ITER);
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITER,
    })
}

/// The score is decreasing in `beta`; a finite maximum needs it positive as
/// `beta -> -inf` and negative as `beta -> +inf`.
fn is_monotone(table: &[EventTime]) -> bool {
    let mut at_plus_inf = 0.0;
    let mut at_minus_inf = 0.0;
    for e in table {
        at_plus_inf += e.d1 - if e.n1 > 0.0 { e.d } else { 0.0 };
        at_minus_inf += e.d1 - if e.n0 > 0.0 { 0.0 } else { e.d };
    }
    at_plus_inf >= 0.0 || at_minus_inf <= 0.0
}

fn finish(beta: f64, info: f64, n_events: usize, iterations: usize) -> Result<CoxFit> {
    if !(info > 0.0) {
        return Err(Error::NonConvergence { iterations });
    }
    let se = 1.0 / info.sqrt();
    Ok(CoxFit {
        log_hr: beta,
        se,
        hr: beta.exp(),
        lo: (beta - Z_975 * se).exp(),
        hi: (beta + Z_975 * se).exp(),
        n_events,
        iterations,
    })
}
