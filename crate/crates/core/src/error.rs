use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// `TRR(t1)` is indistinguishable from 1, i.e. no frailty variance.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The residual has the same sign at both ends of the search bracket.
    #[error("no root in [{lower:e}, {upper:e}]: residual {f_lower:e} at lower end, {f_upper:e} at upper end")]
    NoRoot {
        lower: f64,
        upper: f64,
        f_lower: f64,
        f_upper: f64,
    },

    /// The marginal hazard ratio cannot be produced by the model.
    #[error("marginal hazard ratio {r_mar} is outside the attainable range: {reason}")]
    OutOfRange { r_mar: f64, reason: String },

    #[error("operation is not supported for the {0} family")]
    UnsupportedFamily(&'static str),

    #[error("{failed} of {total} {unit} failed (mostly `{dominant}`)")]
    TooManyFailures {
        /// What was attempted: "draws" or "replications".
        unit: &'static str,
        failed: usize,
        total: usize,
        dominant: &'static str,
    },

    #[error("no events in the sample")]
    NoEvents,

    #[error("all events fall in one exposure arm")]
    Separation,

    #[error("no convergence after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("instrument contrast b_g * (g1 - g2) is zero")]
    DegenerateInstrument,

    #[error("design is singular: all instrument values are equal")]
    SingularDesign,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Stable machine-readable tag.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Degenerate(_) => "degenerate",
            Error::NoRoot { .. } => "no_root",
            Error::OutOfRange { .. } => "out_of_range",
            Error::UnsupportedFamily(_) => "unsupported_family",
            Error::TooManyFailures { .. } => "too_many_failures",
            Error::NoEvents => "no_events",
            Error::Separation => "separation",
            Error::NonConvergence { .. } => "non_convergence",
            Error::DegenerateInstrument => "degenerate_instrument",
            Error::SingularDesign => "singular_design",
            Error::InvalidConfig(_) => "invalid_config",
        }
    }

    /// True for failures of an iterative method rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoRoot { .. } | Error::NonConvergence { .. } | Error::TooManyFailures { .. }
        )
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
