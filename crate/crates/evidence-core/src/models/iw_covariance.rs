//! Zero-mean Gaussian observations with an inverse-Wishart covariance prior,
//! parameterized through the Cholesky factor of the covariance.
//!
//! Observations x_1..x_n are i.i.d. N(0, Σ) with Σ ~ IW(Λ, ν), Λ = I and
//! ν = 5. The parameter vector u packs the lower-triangular Cholesky factor
//! T of Σ row by row (u has length d(d+1)/2; diagonal entries sit at index
//! i(i+3)/2 and must be positive), so the support is a product of half-lines
//! and free coordinates rather than a matrix cone. The change of variables
//! Σ = TT' contributes log|J| = d·ln 2 + Σᵢ (d+1−i)·ln tᵢᵢ (1-based i) to the
//! prior and posterior densities. Conjugacy makes everything closed form:
//! the posterior is IW(Λ + S, ν + n) and the evidence is a ratio of
//! multivariate gamma functions.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, LowerTriangular};
use crate::models::{Model, Support, TruthValue};
use crate::rng::RngStream;
use crate::sampling::{iw_log_pdf, sample_inverse_wishart, sample_mvn, LN_2PI};
use crate::special::log_multivariate_gamma;

const PRIOR_DOF: f64 = 5.0;

/// Inverse-Wishart covariance model; u = packed chol(Σ).
#[derive(Clone, Debug)]
pub struct IwCovariance {
    dim: usize,
    n: usize,
    scatter: DenseMatrix,
    posterior_scale: DenseMatrix,
}

impl IwCovariance {
    /// Builds the model from observations (each of length d).
    pub fn new(data: &[Vec<f64>]) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyInput("covariance model data"));
        }
        let dim = data[0].len();
        if dim == 0 {
            return Err(Error::EmptyInput("covariance model data row"));
        }
        let mut scatter = DenseMatrix::zeros(dim, dim);
        for row in data {
            if row.len() != dim {
                return Err(Error::LengthMismatch {
                    context: "covariance model data row",
                    left: dim,
                    right: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain {
                    what: "covariance model data must be finite",
                });
            }
            for i in 0..dim {
                for j in 0..dim {
                    scatter.set(i, j, scatter.get(i, j) + row[i] * row[j]);
                }
            }
        }
        let posterior_scale = scatter.add_scaled(&DenseMatrix::identity(dim), 1.0)?;
        Ok(Self {
            dim,
            n: data.len(),
            scatter,
            posterior_scale,
        })
    }

    /// The 4×4 ground-truth covariance used by the benchmark.
    pub fn default_true_covariance() -> DenseMatrix {
        DenseMatrix::from_rows(&[
            &[1.662, 1.640, -1.985, -0.007],
            &[1.640, 7.163, -4.146, 5.654],
            &[-1.985, -4.146, 4.906, -1.237],
            &[-0.007, 5.654, -1.237, 6.779],
        ])
        .expect("rows are consistent")
    }

    /// Draws n observations from N(0, cov).
    pub fn generate_data(
        rng: &mut RngStream,
        n: usize,
        cov: &DenseMatrix,
    ) -> Result<Vec<Vec<f64>>> {
        let chol = cov.cholesky()?;
        let zero = alloc::vec![0.0; cov.rows()];
        (0..n).map(|_| sample_mvn(rng, &zero, &chol)).collect()
    }

    /// Packed length of the parameter vector.
    pub fn packed_len(&self) -> usize {
        self.dim * (self.dim + 1) / 2
    }

    /// Rebuilds the Cholesky factor from u; None off the support.
    pub fn chol_from_u(&self, u: &[f64]) -> Option<LowerTriangular> {
        if u.len() != self.packed_len() || u.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let t = LowerTriangular::from_packed(self.dim, u.to_vec()).ok()?;
        for i in 0..self.dim {
            if t.get(i, i) <= 0.0 {
                return None;
            }
        }
        Some(t)
    }

    /// log|∂Σ/∂T| = d·ln2 + Σ_k (d−k)·ln t_kk (0-based k).
    pub fn log_jacobian(&self, t: &LowerTriangular) -> f64 {
        let mut lj = self.dim as f64 * core::f64::consts::LN_2;
        for k in 0..self.dim {
            lj += (self.dim - k) as f64 * libm::log(t.get(k, k));
        }
        lj
    }
}

impl Model for IwCovariance {
    fn name(&self) -> &'static str {
        "iw_covariance"
    }

    fn dim(&self) -> usize {
        self.packed_len()
    }

    fn support(&self) -> Support {
        Support::PositiveCoords((0..self.dim).map(|i| i * (i + 3) / 2).collect())
    }

    fn log_likelihood(&self, u: &[f64]) -> f64 {
        let Some(t) = self.chol_from_u(u) else {
            return f64::NEG_INFINITY;
        };
        // tr(Σ⁻¹S) column by column through triangular solves.
        let mut trace = 0.0;
        let mut col = alloc::vec![0.0; self.dim];
        for j in 0..self.dim {
            for (i, c) in col.iter_mut().enumerate() {
                *c = self.scatter.get(i, j);
            }
            let v = t.solve_spd(&col).expect("dimension checked above");
            trace += v[j];
        }
        let mut log_diag = 0.0;
        for i in 0..self.dim {
            log_diag += libm::log(t.get(i, i));
        }
        let nd = (self.n * self.dim) as f64;
        -0.5 * nd * LN_2PI - self.n as f64 * log_diag - 0.5 * trace
    }

    fn log_prior(&self, u: &[f64]) -> f64 {
        let Some(t) = self.chol_from_u(u) else {
            return f64::NEG_INFINITY;
        };
        let sigma = t.gram();
        let identity = DenseMatrix::identity(self.dim);
        match iw_log_pdf(&sigma, &identity, PRIOR_DOF) {
            Ok(lp) => lp + self.log_jacobian(&t),
            Err(_) => f64::NEG_INFINITY,
        }
    }

    fn log_posterior_density(&self, u: &[f64]) -> Option<f64> {
        let Some(t) = self.chol_from_u(u) else {
            return Some(f64::NEG_INFINITY);
        };
        let sigma = t.gram();
        match iw_log_pdf(&sigma, &self.posterior_scale, PRIOR_DOF + self.n as f64) {
            Ok(lp) => Some(lp + self.log_jacobian(&t)),
            Err(_) => Some(f64::NEG_INFINITY),
        }
    }

    fn sample_posterior(&self, rng: &mut RngStream, count: usize) -> Result<Vec<Vec<f64>>> {
        let dof = PRIOR_DOF + self.n as f64;
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let sigma = sample_inverse_wishart(rng, &self.posterior_scale, dof)?;
            let chol = sigma.cholesky()?;
            out.push(chol.as_packed().to_vec());
        }
        Ok(out)
    }

    fn truth(&self, _rng: &mut RngStream) -> Result<TruthValue> {
        let d = self.dim;
        let n = self.n as f64;
        let nd = n * d as f64;
        // Λ = I, so the (ν/2)·log det Λ term vanishes.
        let log_z = log_multivariate_gamma(d, 0.5 * (n + PRIOR_DOF))?
            - 0.5 * nd * libm::log(core::f64::consts::PI)
            - log_multivariate_gamma(d, 0.5 * PRIOR_DOF)?
            - 0.5 * (n + PRIOR_DOF) * self.posterior_scale.spd_log_det()?;
        Ok(TruthValue { log_z, se: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::chib_identity_check;
    use crate::oracle::{quadrature_log_integral, QuadratureSpec};
    use crate::partition::Rect;
    use crate::special::ln_gamma;
    use approx::assert_relative_eq;

    fn fixture(n: usize, seed: u64) -> IwCovariance {
        let mut rng = RngStream::new(seed, 0);
        let cov = IwCovariance::default_true_covariance();
        let data = IwCovariance::generate_data(&mut rng, n, &cov).unwrap();
        IwCovariance::new(&data).unwrap()
    }

    #[test]
    fn chib_identity_is_u_independent_and_matches_truth() {
        let model = fixture(100, 50);
        let mut rng = RngStream::new(50, 1);
        let truth = model.truth(&mut rng).unwrap().log_z;
        let mut draw_rng = RngStream::new(50, 2);
        for u in model.sample_posterior(&mut draw_rng, 5).unwrap() {
            let z = chib_identity_check(&model, &u).unwrap();
            assert_relative_eq!(z, truth, epsilon = 1e-8);
        }
    }

    #[test]
    fn univariate_truth_matches_conjugate_formula_and_quadrature() {
        // d = 1: IW(1, ν) on σ² is IG(ν/2, 1/2), and the evidence follows
        // from inverse-gamma conjugacy. u = t with σ² = t².
        let mut rng = RngStream::new(51, 0);
        let cov = DenseMatrix::from_rows(&[&[2.5]]).unwrap();
        let data = IwCovariance::generate_data(&mut rng, 40, &cov).unwrap();
        let model = IwCovariance::new(&data).unwrap();
        let s = data.iter().map(|r| r[0] * r[0]).sum::<f64>();
        let n = 40.0;
        let conjugate = -0.5 * n * libm::log(core::f64::consts::PI)
            + ln_gamma(0.5 * (n + PRIOR_DOF))
            - ln_gamma(0.5 * PRIOR_DOF)
            - 0.5 * (n + PRIOR_DOF) * libm::log(1.0 + s);
        let truth = model.truth(&mut rng).unwrap().log_z;
        assert_relative_eq!(truth, conjugate, epsilon = 1e-12);

        // Independent referee over the scalar t: validates the Jacobian
        // end-to-end, since ∫ e^{−ψ(t)} dt must reproduce the evidence.
        let post_mean_var = (1.0 + s) / (n + PRIOR_DOF - 2.0);
        let hi = libm::sqrt(post_mean_var) * 3.0;
        let spec = QuadratureSpec {
            rect: Rect::new(alloc::vec![1e-6], alloc::vec![hi]).unwrap(),
            nodes_per_axis: 4001,
        };
        let q = quadrature_log_integral(|u| -model.psi(u), &spec).unwrap();
        assert!(q.converged);
        assert_relative_eq!(q.log_integral, truth, epsilon = 1e-6);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        // d = 3: perturb each packed entry of T, assemble ∂σ_ij/∂t_kl by
        // central differences, and compare its determinant to the closed
        // form 2^d ∏ t_ii^{d+1−i}.
        let d = 3usize;
        let packed = alloc::vec![1.3, 0.4, 0.9, -0.6, 0.2, 1.7];
        let m = packed.len();
        let sigma_packed = |t: &[f64]| -> Vec<f64> {
            let tri = LowerTriangular::from_packed(d, t.to_vec()).unwrap();
            let s = tri.gram();
            let mut out = Vec::with_capacity(m);
            for i in 0..d {
                for j in 0..=i {
                    out.push(s.get(i, j));
                }
            }
            out
        };
        let h = 1e-5;
        let mut jac = alloc::vec![alloc::vec![0.0; m]; m];
        for col in 0..m {
            let mut plus = packed.clone();
            let mut minus = packed.clone();
            plus[col] += h;
            minus[col] -= h;
            let fp = sigma_packed(&plus);
            let fm = sigma_packed(&minus);
            for row in 0..m {
                jac[row][col] = (fp[row] - fm[row]) / (2.0 * h);
            }
        }
        // Determinant by Gaussian elimination with partial pivoting.
        let mut a = jac.clone();
        let mut det = 1.0f64;
        for c in 0..m {
            let pivot = (c..m)
                .max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))
                .unwrap();
            if pivot != c {
                a.swap(pivot, c);
                det = -det;
            }
            det *= a[c][c];
            for r in c + 1..m {
                let f = a[r][c] / a[c][c];
                for k in c..m {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
        let t = LowerTriangular::from_packed(d, packed.clone()).unwrap();
        let expected = 8.0 * t.get(0, 0).powi(3) * t.get(1, 1).powi(2) * t.get(2, 2);
        assert_relative_eq!(det.abs(), expected, max_relative = 1e-6);

        // And the model's log-Jacobian agrees with the same closed form.
        let model = fixture(10, 52);
        let t4 = LowerTriangular::identity(4);
        assert_relative_eq!(
            model.log_jacobian(&t4),
            4.0 * core::f64::consts::LN_2,
            epsilon = 1e-14
        );
    }

    #[test]
    fn posterior_sampler_matches_inverse_wishart_mean() {
        let model = fixture(100, 53);
        let mut rng = RngStream::new(53, 2);
        let draws = model.sample_posterior(&mut rng, 4000).unwrap();
        let d = 4;
        let mut mean = DenseMatrix::zeros(d, d);
        for u in &draws {
            let t = LowerTriangular::from_packed(d, u.clone()).unwrap();
            let sigma = t.gram();
            mean = mean.add_scaled(&sigma, 1.0).unwrap();
        }
        let scale = 1.0 / draws.len() as f64;
        let mean = DenseMatrix::zeros(d, d).add_scaled(&mean, scale).unwrap();
        let dof = PRIOR_DOF + 100.0;
        let analytic = DenseMatrix::zeros(d, d)
            .add_scaled(&model.posterior_scale, 1.0 / (dof - d as f64 - 1.0))
            .unwrap();
        let diff = mean.add_scaled(&analytic, -1.0).unwrap();
        assert!(
            diff.frobenius_norm() / analytic.frobenius_norm() < 0.05,
            "relative deviation {}",
            diff.frobenius_norm() / analytic.frobenius_norm()
        );
    }

    #[test]
    fn off_support_and_bad_shapes() {
        let model = fixture(20, 54);
        let mut u = alloc::vec![0.0; 10];
        for i in 0..4 {
            u[i * (i + 3) / 2] = 1.0;
        }
        assert!(model.log_likelihood(&u).is_finite());
        u[2] = -1.0; // second diagonal entry
        assert_eq!(model.log_likelihood(&u), f64::NEG_INFINITY);
        assert_eq!(model.psi(&u), f64::INFINITY);
        assert_eq!(model.log_likelihood(&alloc::vec![1.0; 3]), f64::NEG_INFINITY);
        assert!(IwCovariance::new(&[]).is_err());
        assert!(
            IwCovariance::new(&[alloc::vec![1.0, 2.0], alloc::vec![1.0]]).is_err()
        );
    }
}
