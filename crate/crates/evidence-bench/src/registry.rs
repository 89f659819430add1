//! The catalogue of benchmark models and estimators: canonical names,
//! ordering, and per-model defaults.

/// Estimator names in canonical output order.
pub const ESTIMATORS: [&str; 6] = ["hybrid", "hybrid_leafmean", "hme", "came", "bse", "wbse"];

/// Canonical position of an estimator, used for row ordering and for its
/// RNG purpose stream.
pub fn estimator_index(name: &str) -> Option<usize> {
    ESTIMATORS.iter().position(|&e| e == name)
}

/// Default knobs for one benchmark model. `dim` is None when the model's
/// dimension is fixed rather than configurable.
#[derive(Clone, Copy, Debug)]
pub struct ModelDefaults {
    pub name: &'static str,
    pub n_obs: usize,
    pub n_mcmc: usize,
    pub dim: Option<usize>,
    /// One-line description for `list-models`.
    pub notes: &'static str,
}

/// Every benchmark model with its default configuration.
pub const MODELS: [ModelDefaults; 6] = [
    ModelDefaults {
        name: "conjugate_normal",
        n_obs: 50,
        n_mcmc: 1000,
        dim: None,
        notes: "normal data, conjugate prior on (mean, variance); u in R^2",
    },
    ModelDefaults {
        name: "mvn_ig",
        n_obs: 100,
        n_mcmc: 45,
        dim: Some(19),
        notes: "conjugate linear regression; u = (coefficients, noise variance)",
    },
    ModelDefaults {
        name: "truncated_mvn",
        n_obs: 100,
        n_mcmc: 1000,
        dim: Some(2),
        notes: "orthant-truncated Gaussian regression; Gibbs posterior draws",
    },
    ModelDefaults {
        name: "iw_covariance",
        n_obs: 100,
        n_mcmc: 25,
        dim: None,
        notes: "inverse-Wishart covariance (4x4), Cholesky coordinates; u in R^10",
    },
    ModelDefaults {
        name: "hiw_graphical",
        n_obs: 100,
        n_mcmc: 25,
        dim: None,
        notes: "hyper inverse-Wishart on a decomposable graph (default: 5 vertices)",
    },
    ModelDefaults {
        name: "mvn_ig_meanfield",
        n_obs: 100,
        n_mcmc: 100,
        dim: Some(9),
        notes: "mvn_ig target sampled through a factorized (approximate) posterior",
    },
];

pub fn model_defaults(name: &str) -> Option<&'static ModelDefaults> {
    MODELS.iter().find(|m| m.name == name)
}

/// RNG purpose indices; a replication's stream is `rep * 16 + purpose`.
pub mod purpose {
    pub const DATA: u64 = 0;
    pub const POSTERIOR: u64 = 1;
    pub const ORACLE: u64 = 2;
    /// Estimators occupy 3..=8 in canonical order.
    pub const ESTIMATOR_BASE: u64 = 3;
}
