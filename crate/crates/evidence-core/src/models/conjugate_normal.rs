//! Normal observations with the conjugate normal–inverse-gamma prior.
//!
//! Observations y_1..y_n are i.i.d. N(μ, σ²) with prior
//! μ | σ² ~ N(m₀, σ²/w₀) and σ² ~ IG(r₀/2, s₀/2). The parameter vector is
//! u = (μ, σ²). Everything downstream of the sufficient statistics is closed
//! form: the posterior is again normal–inverse-gamma, the evidence is a ratio
//! of gamma functions, and the normalized posterior density is available
//! pointwise, so this model exercises every consistency identity at machine
//! precision.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::models::{Model, Support, TruthValue};
use crate::rng::RngStream;
use crate::sampling::{
    log_inverse_gamma_pdf, log_normal_pdf, sample_inverse_gamma, sample_standard_normal,
};

const PRIOR_MEAN: f64 = 0.0;
const PRIOR_PRECISION_SCALE: f64 = 0.05;
const PRIOR_SHAPE2: f64 = 3.0;
const PRIOR_RATE2: f64 = 3.0;

const DATA_MEAN: f64 = 30.0;
const DATA_SD: f64 = 2.0;

/// Conjugate normal model, holding the data through its sufficient
/// statistics and the precomputed posterior hyperparameters.
#[derive(Clone, Debug)]
pub struct ConjugateNormal {
    n: usize,
    y_bar: f64,
    sum_sq_dev: f64,
    post_mean: f64,
    post_scale: f64,
    post_shape2: f64,
    post_rate2: f64,
}

impl ConjugateNormal {
    /// Builds the model from observed data.
    pub fn new(data: &[f64]) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyInput("conjugate normal data"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain {
                what: "conjugate normal data must be finite",
            });
        }
        let n = data.len();
        let nf = n as f64;
        let y_bar = data.iter().sum::<f64>() / nf;
        let sum_sq_dev = data.iter().map(|&y| (y - y_bar) * (y - y_bar)).sum::<f64>();
        let post_scale = PRIOR_PRECISION_SCALE + nf;
        let post_mean = (nf * y_bar + PRIOR_PRECISION_SCALE * PRIOR_MEAN) / post_scale;
        let post_shape2 = PRIOR_SHAPE2 + nf;
        let shrink = nf * PRIOR_PRECISION_SCALE / post_scale;
        let post_rate2 =
            PRIOR_RATE2 + sum_sq_dev + shrink * (y_bar - PRIOR_MEAN) * (y_bar - PRIOR_MEAN);
        Ok(Self {
            n,
            y_bar,
            sum_sq_dev,
            post_mean,
            post_scale,
            post_shape2,
            post_rate2,
        })
    }

    /// Draws a fresh benchmark dataset: n observations from N(30, 4).
    pub fn generate_data(rng: &mut RngStream, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| DATA_MEAN + DATA_SD * sample_standard_normal(rng))
            .collect()
    }

    /// Posterior mean of μ.
    pub fn posterior_mean(&self) -> f64 {
        self.post_mean
    }

    /// Posterior mean of σ² (defined since the posterior shape exceeds 1).
    pub fn posterior_variance_mean(&self) -> f64 {
        self.post_rate2 / (self.post_shape2 - 2.0)
    }

    fn on_support(u: &[f64]) -> bool {
        u[1] > 0.0
    }
}

impl Model for ConjugateNormal {
    fn name(&self) -> &'static str {
        "conjugate_normal"
    }

    fn dim(&self) -> usize {
        2
    }

    fn support(&self) -> Support {
        Support::PositiveCoords(alloc::vec![1])
    }

    fn log_likelihood(&self, u: &[f64]) -> f64 {
        if !Self::on_support(u) {
            return f64::NEG_INFINITY;
        }
        let (mu, var) = (u[0], u[1]);
        let nf = self.n as f64;
        let sse = self.sum_sq_dev + nf * (self.y_bar - mu) * (self.y_bar - mu);
        -0.5 * nf * libm::log(2.0 * core::f64::consts::PI * var) - 0.5 * sse / var
    }

    fn log_prior(&self, u: &[f64]) -> f64 {
        if !Self::on_support(u) {
            return f64::NEG_INFINITY;
        }
        let (mu, var) = (u[0], u[1]);
        log_normal_pdf(mu, PRIOR_MEAN, libm::sqrt(var / PRIOR_PRECISION_SCALE))
            + log_inverse_gamma_pdf(var, 0.5 * PRIOR_SHAPE2, 0.5 * PRIOR_RATE2)
    }

    fn log_posterior_density(&self, u: &[f64]) -> Option<f64> {
        if !Self::on_support(u) {
            return Some(f64::NEG_INFINITY);
        }
        let (mu, var) = (u[0], u[1]);
        Some(
            log_normal_pdf(mu, self.post_mean, libm::sqrt(var / self.post_scale))
                + log_inverse_gamma_pdf(var, 0.5 * self.post_shape2, 0.5 * self.post_rate2),
        )
    }

    fn sample_posterior(&self, rng: &mut RngStream, count: usize) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let var = sample_inverse_gamma(rng, 0.5 * self.post_shape2, 0.5 * self.post_rate2)?;
            let mu = self.post_mean + libm::sqrt(var / self.post_scale) * sample_standard_normal(rng);
            out.push(alloc::vec![mu, var]);
        }
        Ok(out)
    }

    fn truth(&self, _rng: &mut RngStream) -> Result<TruthValue> {
        let nf = self.n as f64;
        let log_z = -0.5 * nf * libm::log(core::f64::consts::PI)
            + 0.5 * libm::log(PRIOR_PRECISION_SCALE / self.post_scale)
            + crate::special::ln_gamma(0.5 * self.post_shape2)
            - crate::special::ln_gamma(0.5 * PRIOR_SHAPE2)
            + 0.5 * PRIOR_SHAPE2 * libm::log(PRIOR_RATE2)
            - 0.5 * self.post_shape2 * libm::log(self.post_rate2);
        Ok(TruthValue { log_z, se: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::chib_identity_check;
    use crate::oracle::{quadrature_log_integral, QuadratureSpec};
    use crate::partition::Rect;
    use approx::assert_relative_eq;

    fn fixture() -> ConjugateNormal {
        let mut rng = RngStream::new(2024, 0);
        let data = ConjugateNormal::generate_data(&mut rng, 50);
        ConjugateNormal::new(&data).unwrap()
    }

    #[test]
    fn chib_identity_is_u_independent_and_matches_truth() {
        let model = fixture();
        let mut rng = RngStream::new(7, 1);
        let truth = model.truth(&mut rng).unwrap().log_z;
        let probes = [
            alloc::vec![29.5, 3.0],
            alloc::vec![30.5, 5.5],
            alloc::vec![25.0, 1.0],
            alloc::vec![31.0, 10.0],
        ];
        for u in &probes {
            let z = chib_identity_check(&model, u).unwrap();
            assert_relative_eq!(z, truth, epsilon = 1e-10);
        }
    }

    #[test]
    fn truth_matches_two_dimensional_quadrature() {
        let model = fixture();
        let mut rng = RngStream::new(7, 1);
        let truth = model.truth(&mut rng).unwrap().log_z;
        let mu_mean = model.posterior_mean();
        let var_mean = model.posterior_variance_mean();
        let mu_sd = libm::sqrt(var_mean / model.post_scale);
        let var_sd = var_mean / libm::sqrt(0.5 * model.post_shape2 - 2.0);
        let rect = Rect::new(
            alloc::vec![mu_mean - 10.0 * mu_sd, (var_mean - 10.0 * var_sd).max(1e-3)],
            alloc::vec![mu_mean + 10.0 * mu_sd, var_mean + 10.0 * var_sd],
        )
        .unwrap();
        let spec = QuadratureSpec {
            rect,
            nodes_per_axis: 401,
        };
        let q = quadrature_log_integral(|u| -model.psi(u), &spec).unwrap();
        assert!(q.converged);
        assert_relative_eq!(q.log_integral, truth, epsilon = 1e-4);
    }

    #[test]
    fn posterior_sampler_matches_analytic_moments() {
        let model = fixture();
        let mut rng = RngStream::new(11, 2);
        let draws = model.sample_posterior(&mut rng, 20_000).unwrap();
        let n = draws.len() as f64;
        let mean_mu = draws.iter().map(|u| u[0]).sum::<f64>() / n;
        let mean_var = draws.iter().map(|u| u[1]).sum::<f64>() / n;
        assert_relative_eq!(mean_mu, model.posterior_mean(), epsilon = 0.02);
        assert_relative_eq!(
            mean_var,
            model.posterior_variance_mean(),
            max_relative = 0.03
        );
    }

    #[test]
    fn off_support_evaluations_are_minus_infinity() {
        let model = fixture();
        let u = [30.0, -1.0];
        assert_eq!(model.log_likelihood(&u), f64::NEG_INFINITY);
        assert_eq!(model.log_prior(&u), f64::NEG_INFINITY);
        assert_eq!(model.psi(&u), f64::INFINITY);
        assert!(!model.support().contains(&u));
        assert!(model.support().contains(&[30.0, 2.0]));
    }

    #[test]
    fn rejects_degenerate_data() {
        assert!(ConjugateNormal::new(&[]).is_err());
        assert!(ConjugateNormal::new(&[1.0, f64::NAN]).is_err());
    }
}
