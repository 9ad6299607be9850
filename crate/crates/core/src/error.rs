use thiserror::Error;

/// Everything that can go wrong while computing a bound.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// An iterative method (quadrature, root finding, search) stopped
    /// before reaching its tolerance.
    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },

    /// The integrand produced a NaN.
    #[error("integrand returned NaN at x = {at}")]
    NanIntegrand { at: f64 },

    /// The discretized linear program has no feasible point.
    #[error("linear program is infeasible")]
    Infeasible,

    /// The discretized linear program is unbounded.
    #[error("linear program is unbounded")]
    Unbounded,

    /// A certificate does not belong to the problem it was used with, or
    /// failed verification.
    #[error("invalid certificate: {0}")]
    Certificate(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    pub(crate) fn no_converge(what: &'static str, detail: impl Into<String>) -> Self {
        Error::NonConvergence {
            what,
            detail: detail.into(),
        }
    }

    /// True for numerical non-convergence, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::NanIntegrand { .. } | Error::Unbounded
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
