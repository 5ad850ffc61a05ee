use alloc::format;

use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::stats::Z_975;
use crate::uncertainty::SummaryEstimate;

/// Twin recurrence risk `P(co-twin survives | index survives) / P(index survives)`
/// with a Wald interval on the log scale.
///
/// `pairs` holds `(index twin survived, co-twin survived)`.
pub fn estimate_trr(pairs: &[(bool, bool)]) -> Result<SummaryEstimate> {
    let n2 = pairs.len() as f64;
    let b = pairs.iter().filter(|p| p.0).count() as f64;
    let a = pairs.iter().filter(|p| p.0 && p.1).count() as f64;
    if b == 0.0 {
        return Err(Error::Degenerate("no surviving index twin".into()));
    }
    if a == 0.0 {
        return Err(Error::Degenerate("no concordant surviving pair".into()));
    }
    let n1 = b;
    let rr = (a / n1) / (b / n2);
    let se = (1.0 / a - 1.0 / n1 + 1.0 / b - 1.0 / n2).max(0.0).sqrt();
    let ln_rr = rr.ln();
    SummaryEstimate::log(rr, (ln_rr - Z_975 * se).exp(), (ln_rr + Z_975 * se).exp())
}

/// Proportion surviving with a Wald interval clamped to `[0, 1]`.
pub fn estimate_survival(survived: &[bool]) -> Result<SummaryEstimate> {
    let n = survived.len();
    if n < 30 {
        return Err(domain(format!(
            "survival estimate needs at least 30 subjects, got {n}"
        )));
    }
    let p = survived.iter().filter(|&&s| s).count() as f64 / n as f64;
    let half = Z_975 * (p * (1.0 - p) / n as f64).sqrt();
    SummaryEstimate::identity(p, (p - half).max(0.0), (p + half).min(1.0))
}
