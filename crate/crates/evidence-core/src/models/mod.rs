//! The benchmark model zoo: posteriors with analytically known evidence.
//!
//! Every model exposes the same interface: pointwise log likelihood and log
//! prior (hence ψ = −(log lik + log prior), the negative log unnormalized
//! posterior), an exact posterior sampler, the analytic or high-precision
//! reference value of the log evidence, and — where the normalized posterior
//! density is available in closed form — the pointwise identity
//! `log Z = log lik + log prior − log posterior` for cross-checking every
//! evaluator against every other.
//!
//! Evaluators return −∞ off the support and never NaN or panic, so the
//! estimators can probe arbitrary points.

mod conjugate_normal;
mod hiw_graphical;
mod iw_covariance;
mod mvn_ig;
mod truncated_mvn;

pub use conjugate_normal::ConjugateNormal;
pub use hiw_graphical::HiwGraphical;
pub use iw_covariance::IwCovariance;
pub use mvn_ig::{MeanFieldMvnIg, MvnIg};
pub use truncated_mvn::TruncatedMvn;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// The support of a model's parameter vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Support {
    /// All of R^d.
    Unconstrained,
    /// Every coordinate strictly positive.
    PositiveOrthant,
    /// The listed coordinates strictly positive, the rest unconstrained.
    PositiveCoords(Vec<usize>),
}

impl Support {
    pub fn contains(&self, u: &[f64]) -> bool {
        match self {
            Support::Unconstrained => true,
            Support::PositiveOrthant => u.iter().all(|&v| v > 0.0),
            Support::PositiveCoords(idx) => idx.iter().all(|&i| u[i] > 0.0),
        }
    }
}

/// A reference value for the log evidence: exact, or a high-precision
/// numerical value carrying its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruthValue {
    pub log_z: f64,
    /// Monte Carlo standard error on the log scale, when the reference is
    /// itself estimated; None for closed-form values.
    pub se: Option<f64>,
}

/// Common interface of every benchmark model.
pub trait Model {
    fn name(&self) -> &'static str;

    /// Dimension of the parameter vector u.
    fn dim(&self) -> usize;

    fn support(&self) -> Support;

    /// Log likelihood at u; −∞ off the support.
    fn log_likelihood(&self, u: &[f64]) -> f64;

    /// Log prior density at u; −∞ off the support.
    fn log_prior(&self, u: &[f64]) -> f64;

    /// ψ(u) = −(log lik + log prior); +∞ off the support.
    fn psi(&self, u: &[f64]) -> f64 {
        -(self.log_likelihood(u) + self.log_prior(u))
    }

    /// Normalized log posterior density at u, when available in closed form.
    fn log_posterior_density(&self, u: &[f64]) -> Option<f64>;

    /// Draws `count` exact (or converged-MCMC) posterior samples.
    fn sample_posterior(&self, rng: &mut RngStream, count: usize) -> Result<Vec<Vec<f64>>>;

    /// The reference log evidence. The RNG is only touched by models whose
    /// reference requires Monte Carlo (then `se` reports its error).
    fn truth(&self, rng: &mut RngStream) -> Result<TruthValue>;
}

/// The log evidence implied by the pointwise identity
/// `log Z = log lik + log prior − log posterior` at `u`. For models with a
/// closed-form posterior this is u-independent and exactly the truth, which
/// makes it a stringent consistency check across all three evaluators.
pub fn chib_identity_check(model: &dyn Model, u: &[f64]) -> Result<f64> {
    let lpd = model
        .log_posterior_density(u)
        .ok_or(Error::NoPosteriorDensity)?;
    Ok(model.log_likelihood(u) + model.log_prior(u) - lpd)
}
