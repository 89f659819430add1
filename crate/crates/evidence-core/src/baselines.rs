//! Baseline evidence estimators: harmonic mean, the corrected arithmetic
//! mean over a concentration box, and (warped) bridge sampling.
//!
//! All three work from the same posterior draws the hybrid estimator uses.
//! The harmonic mean needs only log-likelihood values. The corrected
//! arithmetic mean importance-samples the unnormalized posterior over a
//! per-axis quantile box and divides by the box's posterior mass, which
//! cancels the truncation. Bridge sampling iterates the optimal-bridge
//! fixed point between the posterior draws and a moment-matched normal
//! proposal; the warped variant first recenters draws at the proposal mean
//! and folds the target symmetrically, which keeps the bridge overlap high
//! for skewed posteriors.
//!
//! Everything runs in the log domain; weight ratios are never exponentiated
//! except inside log-sum-exp.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, LowerTriangular};
use crate::logmath::{log_add_exp, log_sum_exp};
use crate::models::Support;
use crate::partition::LabeledSample;
use crate::sampling::{mvn_log_pdf_chol_cov, sample_mvn};

/// Harmonic mean estimate from log-likelihood values at posterior draws:
/// `log Ẑ = log J − log Σ_j e^{−ℓ_j}`.
pub fn harmonic_mean(log_likelihoods: &[f64]) -> Result<f64> {
    if log_likelihoods.is_empty() {
        return Err(Error::EmptyInput("harmonic_mean log likelihoods"));
    }
    let negated: Vec<f64> = log_likelihoods.iter().map(|v| -v).collect();
    Ok(libm::log(log_likelihoods.len() as f64) - log_sum_exp(&negated)?)
}

/// Sample mean and covariance (denominator n − 1) of the draw cloud.
fn moment_match(points: &[Vec<f64>]) -> Result<(Vec<f64>, DenseMatrix)> {
    let n = points.len();
    if n < 2 {
        return Err(Error::EmptyInput("moment matching needs at least 2 draws"));
    }
    let d = points[0].len();
    let mut mean = alloc::vec![0.0; d];
    for p in points {
        for i in 0..d {
            mean[i] += p[i];
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut cov = DenseMatrix::zeros(d, d);
    for p in points {
        for i in 0..d {
            for j in 0..=i {
                let v = cov.get(i, j) + (p[i] - mean[i]) * (p[j] - mean[j]);
                cov.set(i, j, v);
                cov.set(j, i, v);
            }
        }
    }
    let scale = 1.0 / (n as f64 - 1.0);
    for i in 0..d {
        for j in 0..d {
            cov.set(i, j, cov.get(i, j) * scale);
        }
    }
    Ok((mean, cov))
}

/// Cholesky of the moment-matched covariance, falling back to its diagonal
/// when the full matrix is numerically rank-deficient.
fn proposal_chol(cov: &DenseMatrix) -> Result<LowerTriangular> {
    match cov.cholesky() {
        Ok(c) => Ok(c),
        Err(Error::NotPositiveDefinite { .. }) => {
            let d = cov.rows();
            let mut diag = DenseMatrix::zeros(d, d);
            for i in 0..d {
                let v = cov.get(i, i);
                if !(v > 0.0) {
                    return Err(Error::DegenerateAxis { axis: i });
                }
                diag.set(i, i, v);
            }
            diag.cholesky()
        }
        Err(e) => Err(e),
    }
}

/// Configuration for the corrected arithmetic mean estimator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CameConfig {
    /// Per-side tail fraction defining the concentration box.
    pub quantile_alpha: f64,
    /// Importance draws; None means 10 × J.
    pub importance_draw_count: Option<usize>,
    /// Effective-sample-size level below which `low_ess` is set.
    pub ess_warn_threshold: f64,
}

impl Default for CameConfig {
    fn default() -> Self {
        Self {
            quantile_alpha: 0.005,
            importance_draw_count: None,
            ess_warn_threshold: 10.0,
        }
    }
}

/// Result of the corrected arithmetic mean estimator.
#[derive(Clone, Debug, PartialEq)]
pub struct CameOutcome {
    pub log_ml: f64,
    /// Effective sample size of the in-box importance weights.
    pub ess: f64,
    pub low_ess: bool,
    /// Acceptance rate of the support-truncation rejection step.
    pub support_acceptance: f64,
    /// Fraction of posterior draws inside the concentration box.
    pub box_posterior_fraction: f64,
    /// Importance draws that landed inside the box.
    pub inside_importance_count: usize,
}

/// Corrected arithmetic mean estimate.
///
/// Builds the per-axis quantile box A from the posterior draws, importance
/// samples `log_q` under a moment-matched normal truncated to the support,
/// and corrects by the box's posterior mass:
/// `log Ẑ = log Σ_{v ∈ A} q(v)/g(v) − log N − log P̂(A)`.
pub fn came<R: Rng + ?Sized>(
    rng: &mut R,
    samples: &[LabeledSample],
    support: &Support,
    log_q: impl Fn(&[f64]) -> f64,
    config: &CameConfig,
) -> Result<CameOutcome> {
    let j = samples.len();
    if j < 2 {
        return Err(Error::EmptyInput("came posterior draws"));
    }
    let alpha = config.quantile_alpha;
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::InvalidParameter {
            name: "came quantile_alpha",
        });
    }
    let d = samples[0].point.len();
    let points: Vec<Vec<f64>> = samples.iter().map(|s| s.point.clone()).collect();

    // Concentration box from per-axis order statistics.
    let mut lower = alloc::vec![0.0; d];
    let mut upper = alloc::vec![0.0; d];
    for axis in 0..d {
        let mut vals: Vec<f64> = points.iter().map(|p| p[axis]).collect();
        vals.sort_by(f64::total_cmp);
        let lo_idx = libm::floor(alpha * (j as f64 - 1.0)) as usize;
        let hi_idx = libm::ceil((1.0 - alpha) * (j as f64 - 1.0)) as usize;
        lower[axis] = vals[lo_idx];
        upper[axis] = vals[hi_idx];
        if !(upper[axis] - lower[axis] > 0.0) {
            return Err(Error::DegenerateAxis { axis });
        }
    }
    let in_box = |p: &[f64]| -> bool {
        (0..d).all(|i| lower[i] <= p[i] && p[i] <= upper[i])
    };

    let inside_posterior = points.iter().filter(|p| in_box(p)).count();
    debug_assert!(inside_posterior > 0, "box is built from these draws");
    let log_box_mass = libm::log(inside_posterior as f64 / j as f64);

    let (mean, cov) = moment_match(&points)?;
    let chol = proposal_chol(&cov)?;

    let n = config.importance_draw_count.unwrap_or(10 * j);
    let max_attempts = n.saturating_mul(1000);
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    let mut log_weights = Vec::new();
    while accepted < n {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::ZeroProbabilityEstimate);
        }
        let v = sample_mvn(rng, &mean, &chol)?;
        if !support.contains(&v) {
            continue;
        }
        accepted += 1;
        if in_box(&v) {
            let lq = log_q(&v);
            if lq.is_nan() {
                return Err(Error::Domain {
                    what: "log_q returned NaN in came",
                });
            }
            let lg = mvn_log_pdf_chol_cov(&v, &mean, &chol)?;
            log_weights.push(lq - lg);
        }
    }
    let support_acceptance = accepted as f64 / attempts as f64;
    if log_weights.is_empty() {
        return Err(Error::EmptyConcentrationSet);
    }
    // The truncated proposal density is φ/p̂_in, so each weight gains
    // +log p̂_in; over the sum that is a constant shift.
    let log_p_in = libm::log(support_acceptance);
    let lse_w = log_sum_exp(&log_weights)?;
    let doubled: Vec<f64> = log_weights.iter().map(|w| 2.0 * w).collect();
    let ess = libm::exp(2.0 * lse_w - log_sum_exp(&doubled)?);
    let log_ml = lse_w + log_p_in - libm::log(n as f64) - log_box_mass;
    Ok(CameOutcome {
        log_ml,
        ess,
        low_ess: ess < config.ess_warn_threshold,
        support_acceptance,
        box_posterior_fraction: inside_posterior as f64 / j as f64,
        inside_importance_count: log_weights.len(),
    })
}

/// Configuration for (warped) bridge sampling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BridgeConfig {
    /// Proposal draws; None means as many as there are posterior draws.
    pub proposal_draw_count: Option<usize>,
    /// Relative fixed-point tolerance.
    pub tol: f64,
    pub max_iterations: usize,
    /// Recenter draws and fold the target symmetrically before bridging.
    pub warp: bool,
}

impl Default for BridgeConfig {
    fn default() -> Self {
        Self {
            proposal_draw_count: None,
            tol: 1e-8,
            max_iterations: 500,
            warp: false,
        }
    }
}

/// Result of a converged bridge-sampling run.
#[derive(Clone, Debug, PartialEq)]
pub struct BridgeOutcome {
    pub log_ml: f64,
    pub iterations: usize,
    pub proposal_draws: usize,
}

/// Optimal-bridge estimate of the normalizer of `q`.
///
/// The posterior draws are split in half: even indices fit the
/// moment-matched normal proposal, odd indices enter the bridge. The
/// fixed-point iteration runs on `r = log Ẑ`:
///
/// ```text
/// numer = LSE_j[ ℓ2_j − LAE(ln s1 + ℓ2_j, ln s2 + r) ] − ln n_g
/// denom = LSE_i[       − LAE(ln s1 + ℓ1_i, ln s2 + r) ] − ln n_p
/// ```
///
/// with ℓ = log q − log g at posterior (ℓ1) and proposal (ℓ2) points and
/// s1, s2 the draw-count fractions. Non-convergence within
/// `max_iterations` returns [`Error::BridgeNonConvergence`] carrying the
/// last iterate.
pub fn bridge_sampling<R: Rng + ?Sized>(
    rng: &mut R,
    samples: &[LabeledSample],
    log_q: impl Fn(&[f64]) -> f64,
    config: &BridgeConfig,
) -> Result<BridgeOutcome> {
    let j = samples.len();
    if j < 4 {
        return Err(Error::EmptyInput("bridge_sampling needs at least 4 draws"));
    }
    let d = samples[0].point.len();
    let fit: Vec<&LabeledSample> = samples.iter().step_by(2).collect();
    let iter_half: Vec<&LabeledSample> = samples.iter().skip(1).step_by(2).collect();
    let n_p = iter_half.len();
    let n_g = config.proposal_draw_count.unwrap_or(j);
    if n_g == 0 {
        return Err(Error::InvalidParameter {
            name: "bridge proposal_draw_count",
        });
    }

    let fit_points: Vec<Vec<f64>> = fit.iter().map(|s| s.point.clone()).collect();
    let (mu, cov) = moment_match(&fit_points)?;
    let chol = proposal_chol(&cov)?;

    // ℓ1 at the iteration half and ℓ2 at fresh proposal draws.
    let (l1, l2): (Vec<f64>, Vec<f64>) = if config.warp {
        // Folded target h(η) = (q(μ̂+η) + q(μ̂−η))/2 against N(0, Σ̂).
        let zero = alloc::vec![0.0; d];
        let log_h = |eta: &[f64]| -> f64 {
            let plus: Vec<f64> = mu.iter().zip(eta).map(|(m, e)| m + e).collect();
            let minus: Vec<f64> = mu.iter().zip(eta).map(|(m, e)| m - e).collect();
            log_add_exp(log_q(&plus), log_q(&minus)) - core::f64::consts::LN_2
        };
        let mut l1 = Vec::with_capacity(n_p);
        for s in &iter_half {
            let eta: Vec<f64> = s.point.iter().zip(&mu).map(|(p, m)| p - m).collect();
            l1.push(log_h(&eta) - mvn_log_pdf_chol_cov(&eta, &zero, &chol)?);
        }
        let mut l2 = Vec::with_capacity(n_g);
        for _ in 0..n_g {
            let eta = sample_mvn(rng, &zero, &chol)?;
            l2.push(log_h(&eta) - mvn_log_pdf_chol_cov(&eta, &zero, &chol)?);
        }
        (l1, l2)
    } else {
        let mut l1 = Vec::with_capacity(n_p);
        for s in &iter_half {
            l1.push(-s.psi - mvn_log_pdf_chol_cov(&s.point, &mu, &chol)?);
        }
        let mut l2 = Vec::with_capacity(n_g);
        for _ in 0..n_g {
            let v = sample_mvn(rng, &mu, &chol)?;
            l2.push(log_q(&v) - mvn_log_pdf_chol_cov(&v, &mu, &chol)?);
        }
        (l1, l2)
    };
    if l1.iter().chain(&l2).any(|v| v.is_nan()) {
        return Err(Error::Domain {
            what: "non-finite bridge log ratio",
        });
    }

    let ln_s1 = libm::log(n_p as f64 / (n_p + n_g) as f64);
    let ln_s2 = libm::log(n_g as f64 / (n_p + n_g) as f64);
    // Importance-sampling initialization from the proposal draws.
    let mut r = log_sum_exp(&l2)? - libm::log(n_g as f64);
    if r == f64::NEG_INFINITY {
        return Err(Error::DegenerateWeights("no proposal draw hit the support"));
    }
    for t in 0..config.max_iterations {
        let numer_terms: Vec<f64> = l2
            .iter()
            .map(|&v| v - log_add_exp(ln_s1 + v, ln_s2 + r))
            .collect();
        let denom_terms: Vec<f64> = l1
            .iter()
            .map(|&v| -log_add_exp(ln_s1 + v, ln_s2 + r))
            .collect();
        let numer = log_sum_exp(&numer_terms)? - libm::log(n_g as f64);
        let denom = log_sum_exp(&denom_terms)? - libm::log(n_p as f64);
        let next = numer - denom;
        if !next.is_finite() {
            return Err(Error::DegenerateWeights("bridge iterate left the finite range"));
        }
        let done = libm::fabs(next - r) < config.tol * libm::fabs(next).max(1.0);
        r = next;
        if done {
            return Ok(BridgeOutcome {
                log_ml: r,
                iterations: t + 1,
                proposal_draws: n_g,
            });
        }
    }
    Err(Error::BridgeNonConvergence {
        last_estimate: r,
        iterations: config.max_iterations,
    })
}
