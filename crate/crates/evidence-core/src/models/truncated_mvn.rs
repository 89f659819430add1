//! Linear regression with known noise variance and a positive-orthant
//! truncated Gaussian prior on the coefficients.
//!
//! With σ² fixed and prior 2^d·N(0, (σ²/λ)I) restricted to β > 0, the
//! posterior is the orthant-truncated Gaussian N(m, Q⁻¹) with
//! Q = (X'X + λI)/σ² and m = Q⁻¹X'y/σ². The evidence reduces to Gaussian
//! algebra times an orthant probability, which is computed by tensor
//! quadrature in d ≤ 3 and by Monte Carlo above that (the reference then
//! carries a standard error). Posterior draws come from a Gibbs sweep over
//! one-dimensional truncated conditionals.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::models::{Model, Support, TruthValue};
use crate::oracle::{default_nodes_for_dim, orthant_log_probability, OrthantMethod};
use crate::rng::RngStream;
use crate::sampling::{gibbs_truncated_mvn, sample_standard_normal, LN_2PI};

const NOISE_VAR: f64 = 4.0;
const RIDGE: f64 = 0.25;
const GIBBS_BURN_IN: usize = 500;
const GIBBS_THIN: usize = 5;
const ORTHANT_MC_DRAWS: usize = 400_000;

/// Orthant-truncated Gaussian regression; u = β ∈ R₊^d.
#[derive(Clone, Debug)]
pub struct TruncatedMvn {
    x: DenseMatrix,
    y: Vec<f64>,
    dim: usize,
    /// Posterior precision Q = (X'X + λI)/σ².
    precision: DenseMatrix,
    /// Posterior covariance Q⁻¹.
    covariance: DenseMatrix,
    /// Untruncated posterior mean m = Q⁻¹ X'y/σ².
    mean: Vec<f64>,
    log_det_precision: f64,
    half_quad: f64,
    /// log P(N(m, Q⁻¹) > 0), cached at construction when d ≤ 3.
    log_orthant: Option<f64>,
}

impl TruncatedMvn {
    /// Builds the model from a design matrix (n×d) and responses (length n).
    pub fn new(x: DenseMatrix, y: Vec<f64>) -> Result<Self> {
        let n = x.rows();
        let dim = x.cols();
        if n == 0 || dim == 0 {
            return Err(Error::EmptyInput("truncated regression design matrix"));
        }
        if y.len() != n {
            return Err(Error::LengthMismatch {
                context: "truncated regression responses",
                left: n,
                right: y.len(),
            });
        }
        let xt = x.transpose();
        let ridged = xt.matmul(&x)?.add_scaled(&DenseMatrix::identity(dim), RIDGE)?;
        let precision = DenseMatrix::zeros(dim, dim).add_scaled(&ridged, 1.0 / NOISE_VAR)?;
        let b: Vec<f64> = xt.matvec(&y)?.iter().map(|v| v / NOISE_VAR).collect();
        let covariance = precision.spd_inverse()?;
        let mean = covariance.matvec(&b)?;
        let log_det_precision = precision.spd_log_det()?;
        let half_quad = 0.5 * mean.iter().zip(b.iter()).map(|(m, bi)| m * bi).sum::<f64>();
        let log_orthant = if dim <= 3 {
            // The quadrature branch never touches the RNG.
            let mut unused = RngStream::new(0, 0);
            Some(
                orthant_log_probability(
                    &mut unused,
                    &mean,
                    &covariance,
                    OrthantMethod::Quadrature {
                        nodes_per_axis: default_nodes_for_dim(dim),
                    },
                )?
                .log_probability,
            )
        } else {
            None
        };
        Ok(Self {
            x,
            y,
            dim,
            precision,
            covariance,
            mean,
            log_det_precision,
            half_quad,
            log_orthant,
        })
    }

    /// Draws a benchmark dataset: X with i.i.d. N(0,1) entries,
    /// β_true ~ U[0, 1]^d, y = Xβ_true + N(0, 4) noise.
    pub fn generate_data(rng: &mut RngStream, n: usize, dim: usize) -> (DenseMatrix, Vec<f64>) {
        use rand::Rng as _;
        let beta_true: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
        let mut entries = Vec::with_capacity(n * dim);
        for _ in 0..n * dim {
            entries.push(sample_standard_normal(rng));
        }
        let x = DenseMatrix::new(n, dim, entries).expect("dimensions are consistent");
        let mut y = x.matvec(&beta_true).expect("dimensions are consistent");
        for v in y.iter_mut() {
            *v += libm::sqrt(NOISE_VAR) * sample_standard_normal(rng);
        }
        (x, y)
    }

    /// Untruncated posterior mean m.
    pub fn untruncated_mean(&self) -> &[f64] {
        &self.mean
    }

    fn on_support(&self, u: &[f64]) -> bool {
        u.iter().all(|&v| v > 0.0)
    }
}

impl Model for TruncatedMvn {
    fn name(&self) -> &'static str {
        "truncated_mvn"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn support(&self) -> Support {
        Support::PositiveOrthant
    }

    fn log_likelihood(&self, u: &[f64]) -> f64 {
        if !self.on_support(u) {
            return f64::NEG_INFINITY;
        }
        let fitted = self.x.matvec(u).expect("dimension checked by caller");
        let rss = self
            .y
            .iter()
            .zip(fitted.iter())
            .map(|(yi, fi)| (yi - fi) * (yi - fi))
            .sum::<f64>();
        let n = self.x.rows() as f64;
        -0.5 * n * (LN_2PI + libm::log(NOISE_VAR)) - 0.5 * rss / NOISE_VAR
    }

    fn log_prior(&self, u: &[f64]) -> f64 {
        if !self.on_support(u) {
            return f64::NEG_INFINITY;
        }
        let d = self.dim as f64;
        let quad = u.iter().map(|v| v * v).sum::<f64>();
        d * core::f64::consts::LN_2 - 0.5 * d * (LN_2PI + libm::log(NOISE_VAR / RIDGE))
            - 0.5 * RIDGE * quad / NOISE_VAR
    }

    fn log_posterior_density(&self, u: &[f64]) -> Option<f64> {
        let log_orthant = self.log_orthant?;
        if !self.on_support(u) {
            return Some(f64::NEG_INFINITY);
        }
        let diff: Vec<f64> = u.iter().zip(self.mean.iter()).map(|(a, b)| a - b).collect();
        let quad = self
            .precision
            .quadratic_form(&diff)
            .expect("dimension checked by caller");
        let d = self.dim as f64;
        Some(-0.5 * d * LN_2PI + 0.5 * self.log_det_precision - 0.5 * quad - log_orthant)
    }

    fn sample_posterior(&self, rng: &mut RngStream, count: usize) -> Result<Vec<Vec<f64>>> {
        gibbs_truncated_mvn(
            rng,
            &self.mean,
            &self.precision,
            GIBBS_BURN_IN,
            GIBBS_THIN,
            count,
        )
    }

    fn truth(&self, rng: &mut RngStream) -> Result<TruthValue> {
        let n = self.x.rows() as f64;
        let d = self.dim as f64;
        let yty = self.y.iter().map(|v| v * v).sum::<f64>();
        let gaussian_part = d * core::f64::consts::LN_2
            - 0.5 * n * (LN_2PI + libm::log(NOISE_VAR))
            + 0.5 * d * libm::log(RIDGE / NOISE_VAR)
            - 0.5 * yty / NOISE_VAR
            + self.half_quad
            - 0.5 * self.log_det_precision;
        match self.log_orthant {
            Some(lo) => Ok(TruthValue {
                log_z: gaussian_part + lo,
                se: None,
            }),
            None => {
                let mc = orthant_log_probability(
                    rng,
                    &self.mean,
                    &self.covariance,
                    OrthantMethod::MonteCarlo {
                        draws: ORTHANT_MC_DRAWS,
                    },
                )?;
                Ok(TruthValue {
                    log_z: gaussian_part + mc.log_probability,
                    se: mc.se_log,
                })
            }
        }
    }
}
