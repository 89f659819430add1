//! Reference integrals: log-domain tensor-product quadrature and Gaussian
//! orthant probabilities.
//!
//! The quadrature evaluates `log ∫ e^{log_f}` over a box with the composite
//! trapezoid rule on a tensor grid, entirely by streaming log-sum-exp. The
//! rule is evaluated twice — once on the requested grid and once with the
//! spacing halved — and the pair feeds one Richardson extrapolation step,
//! which upgrades the O(h²) trapezoid to O(h⁴). The raw difference between
//! the two evaluations is reported as `refinement_delta` and gates the
//! `converged` flag, so a caller can tell when the grid was too coarse
//! instead of silently trusting the number.
//!
//! Dimensions above 3 are refused: tensor grids grow as n^d, and every
//! reference value needed here lives in d ≤ 3. Higher-dimensional orthant
//! probabilities fall back to plain Monte Carlo with a delta-method standard
//! error on the log scale.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::partition::Rect;
use crate::sampling::sample_mvn;

/// Largest dimension the tensor quadrature accepts.
pub const MAX_QUADRATURE_DIM: usize = 3;

/// Convergence gate on the raw two-grid difference.
pub const REFINEMENT_TOLERANCE: f64 = 1e-5;

/// A quadrature request: the box and the base grid resolution per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub rect: Rect,
    pub nodes_per_axis: usize,
}

/// Sensible per-axis resolution for each supported dimension, sized so the
/// refined pass stays in the tens of millions of evaluations at worst.
pub fn default_nodes_for_dim(dim: usize) -> usize {
    match dim {
        1 => 2001,
        2 => 401,
        _ => 121,
    }
}

/// Result of a quadrature evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    /// Richardson-extrapolated log integral.
    pub log_integral: f64,
    /// |log T(h/2) − log T(h)|, the raw two-grid difference.
    pub refinement_delta: f64,
    /// Whether the two-grid difference met [`REFINEMENT_TOLERANCE`].
    pub converged: bool,
}

/// Streaming log-sum-exp accumulator.
struct LseAcc {
    max: f64,
    sum: f64,
}

impl LseAcc {
    fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    fn push(&mut self, v: f64) {
        if v == f64::NEG_INFINITY {
            return;
        }
        if v <= self.max {
            self.sum += libm::exp(v - self.max);
        } else {
            self.sum = self.sum * libm::exp(self.max - v) + 1.0;
            self.max = v;
        }
    }

    fn value(&self) -> f64 {
        if self.sum == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + libm::log(self.sum)
        }
    }
}

fn trapezoid_axis(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = (b - a) / (n as f64 - 1.0);
    let mut xs = Vec::with_capacity(n);
    let mut log_w = Vec::with_capacity(n);
    for i in 0..n {
        xs.push(if i == n - 1 { b } else { a + i as f64 * h });
        let w = if i == 0 || i == n - 1 { 0.5 * h } else { h };
        log_w.push(libm::log(w));
    }
    (xs, log_w)
}

fn trapezoid_pass(
    log_f: &mut dyn FnMut(&[f64]) -> f64,
    rect: &Rect,
    n: usize,
) -> Result<f64> {
    let d = rect.dim();
    let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..d)
        .map(|k| trapezoid_axis(rect.lower()[k], rect.upper()[k], n))
        .collect();
    let mut acc = LseAcc::new();
    let mut point = [0.0f64; MAX_QUADRATURE_DIM];
    let mut push = |point: &[f64], lw: f64| -> Result<()> {
        let v = log_f(point);
        if v.is_nan() || v == f64::INFINITY {
            return Err(Error::NonFiniteIntegrand);
        }
        acc.push(v + lw);
        Ok(())
    };
    match d {
        1 => {
            for i in 0..n {
                point[0] = axes[0].0[i];
                push(&point[..1], axes[0].1[i])?;
            }
        }
        2 => {
            for i in 0..n {
                point[0] = axes[0].0[i];
                for jj in 0..n {
                    point[1] = axes[1].0[jj];
                    push(&point[..2], axes[0].1[i] + axes[1].1[jj])?;
                }
            }
        }
        3 => {
            for i in 0..n {
                point[0] = axes[0].0[i];
                for jj in 0..n {
                    point[1] = axes[1].0[jj];
                    let lw2 = axes[0].1[i] + axes[1].1[jj];
                    for k in 0..n {
                        point[2] = axes[2].0[k];
                        push(&point[..3], lw2 + axes[2].1[k])?;
                    }
                }
            }
        }
        _ => unreachable!("dimension validated by caller"),
    }
    Ok(acc.value())
}

/// `log ∫_rect e^{log_f(x)} dx` by two-grid trapezoid plus one Richardson
/// step. `log_f` may return −∞ (zero regions) but never NaN or +∞.
pub fn quadrature_log_integral(
    mut log_f: impl FnMut(&[f64]) -> f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    let d = spec.rect.dim();
    if d > MAX_QUADRATURE_DIM {
        return Err(Error::UnsupportedDimension {
            dim: d,
            max: MAX_QUADRATURE_DIM,
        });
    }
    if spec.nodes_per_axis < 2 {
        return Err(Error::InvalidParameter {
            name: "quadrature nodes_per_axis",
        });
    }
    let coarse = trapezoid_pass(&mut log_f, &spec.rect, spec.nodes_per_axis)?;
    let fine = trapezoid_pass(&mut log_f, &spec.rect, 2 * spec.nodes_per_axis - 1)?;
    let refinement_delta = libm::fabs(fine - coarse);
    // T_R = T_fine + (T_fine − T_coarse)/3, carried out in the log domain.
    let ratio_arg = (1.0 - libm::exp(coarse - fine)) / 3.0;
    let log_integral = if coarse == f64::NEG_INFINITY && fine == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else if ratio_arg > -1.0 {
        fine + libm::log1p(ratio_arg)
    } else {
        // The coarse pass dwarfs the fine one; extrapolation is meaningless.
        fine
    };
    Ok(QuadratureResult {
        log_integral,
        refinement_delta,
        converged: refinement_delta < REFINEMENT_TOLERANCE,
    })
}

/// How to compute a Gaussian orthant probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrthantMethod {
    /// Tensor quadrature over [0, max(μ_i, 0) + 10 σ_i] per axis; d ≤ 3.
    Quadrature { nodes_per_axis: usize },
    /// Plain Monte Carlo hit counting; any dimension.
    MonteCarlo { draws: usize },
}

/// A Gaussian orthant probability on the log scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrthantResult {
    pub log_probability: f64,
    /// Delta-method standard error of the log probability (Monte Carlo
    /// path only).
    pub se_log: Option<f64>,
    /// Quadrature refinement gate; always true for Monte Carlo.
    pub converged: bool,
}

/// P(X > 0 componentwise) for X ~ N(mean, cov).
pub fn orthant_log_probability<R: Rng + ?Sized>(
    rng: &mut R,
    mean: &[f64],
    cov: &DenseMatrix,
    method: OrthantMethod,
) -> Result<OrthantResult> {
    let d = mean.len();
    if cov.rows() != d || cov.cols() != d {
        return Err(Error::DimensionMismatch {
            context: "orthant_log_probability",
            expected: d,
            got: cov.rows(),
        });
    }
    match method {
        OrthantMethod::Quadrature { nodes_per_axis } => {
            if d > MAX_QUADRATURE_DIM {
                return Err(Error::UnsupportedDimension {
                    dim: d,
                    max: MAX_QUADRATURE_DIM,
                });
            }
            // Inline density evaluation: no allocation per grid point.
            let prec = cov.spd_inverse()?;
            let log_det = cov.spd_log_det()?;
            let log_norm = -0.5 * (d as f64) * libm::log(2.0 * core::f64::consts::PI)
                - 0.5 * log_det;
            let mut upper = Vec::with_capacity(d);
            for i in 0..d {
                let sd = libm::sqrt(cov.get(i, i));
                upper.push(mean[i].max(0.0) + 10.0 * sd);
            }
            let rect = Rect::new(alloc::vec![0.0; d], upper)?;
            let spec = QuadratureSpec {
                rect,
                nodes_per_axis,
            };
            let q = quadrature_log_integral(
                |x: &[f64]| {
                    let mut quad = 0.0;
                    for i in 0..d {
                        for j in 0..d {
                            quad += (x[i] - mean[i]) * prec.get(i, j) * (x[j] - mean[j]);
                        }
                    }
                    log_norm - 0.5 * quad
                },
                &spec,
            )?;
            Ok(OrthantResult {
                log_probability: q.log_integral,
                se_log: None,
                converged: q.converged,
            })
        }
        OrthantMethod::MonteCarlo { draws } => {
            if draws == 0 {
                return Err(Error::InvalidParameter {
                    name: "orthant Monte Carlo draws",
                });
            }
            let chol = cov.cholesky()?;
            let mut hits = 0usize;
            for _ in 0..draws {
                let x = sample_mvn(rng, mean, &chol)?;
                if x.iter().all(|&v| v > 0.0) {
                    hits += 1;
                }
            }
            if hits == 0 {
                return Err(Error::ZeroProbabilityEstimate);
            }
            let p = hits as f64 / draws as f64;
            let se_log = libm::sqrt((1.0 - p) / (draws as f64 * p));
            Ok(OrthantResult {
                log_probability: libm::log(p),
                se_log: Some(se_log),
                converged: true,
            })
        }
    }
}
