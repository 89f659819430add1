//! Log-density helpers and random samplers for the model zoo.
//!
//! All densities are returned in the log domain and all samplers draw through
//! a caller-supplied [`rand::Rng`], so every downstream consumer inherits the
//! deterministic stream discipline of [`crate::rng::RngStream`].
//!
//! Matrix-variate conventions: the inverse Wishart `IW(Λ, ν)` here is the
//! distribution of `Σ = W⁻¹` for `W ~ Wishart(ν, Λ⁻¹)`, with density
//! proportional to `|Σ|^{−(ν+d+1)/2} exp(−tr(Λ Σ⁻¹)/2)` and mean
//! `Λ/(ν−d−1)`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal, StandardUniform};

use crate::error::{Error, Result};
use crate::graph::DecomposableGraph;
use crate::linalg::{DenseMatrix, LowerTriangular};
use crate::special::{ln_gamma, log_multivariate_gamma, norm_cdf, norm_quantile};

/// ln(2π), shared by every Gaussian density in the crate.
pub const LN_2PI: f64 = 1.8378770664093453;

/// Log density of N(mean, sd²) at `x`.
pub fn log_normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    -0.5 * LN_2PI - libm::log(sd) - 0.5 * z * z
}

/// Log density of the inverse gamma IG(shape, rate) at `x`:
/// `rate^shape / Γ(shape) · x^{−shape−1} e^{−rate/x}`. Returns −∞ for x ≤ 0.
pub fn log_inverse_gamma_pdf(x: f64, shape: f64, rate: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    shape * libm::log(rate) - ln_gamma(shape) - (shape + 1.0) * libm::log(x) - rate / x
}

/// Log density of N(mean, Σ) at `x`, given `chol` = chol(Σ).
pub fn mvn_log_pdf_chol_cov(x: &[f64], mean: &[f64], chol: &LowerTriangular) -> Result<f64> {
    let d = chol.dim();
    if x.len() != d || mean.len() != d {
        return Err(Error::LengthMismatch {
            context: "mvn_log_pdf_chol_cov",
            left: x.len(),
            right: d,
        });
    }
    let diff: Vec<f64> = x.iter().zip(mean).map(|(a, b)| a - b).collect();
    // ‖L⁻¹(x−μ)‖² with Σ = LLᵀ.
    let z = chol.solve(&diff, false)?;
    let quad: f64 = z.iter().map(|v| v * v).sum();
    let half_log_det: f64 = (0..d).map(|i| libm::log(chol.get(i, i))).sum();
    Ok(-0.5 * (d as f64) * LN_2PI - half_log_det - 0.5 * quad)
}

/// Log density of N(mean, Q⁻¹) at `x`, given `chol` = chol(Q) for the
/// precision matrix Q.
pub fn mvn_log_pdf_chol_prec(x: &[f64], mean: &[f64], chol: &LowerTriangular) -> Result<f64> {
    let d = chol.dim();
    if x.len() != d || mean.len() != d {
        return Err(Error::LengthMismatch {
            context: "mvn_log_pdf_chol_prec",
            left: x.len(),
            right: d,
        });
    }
    let diff: Vec<f64> = x.iter().zip(mean).map(|(a, b)| a - b).collect();
    // (x−μ)ᵀQ(x−μ) = ‖Lᵀ(x−μ)‖² with Q = LLᵀ.
    let z = chol.matvec(&diff, true)?;
    let quad: f64 = z.iter().map(|v| v * v).sum();
    let half_log_det: f64 = (0..d).map(|i| libm::log(chol.get(i, i))).sum();
    Ok(-0.5 * (d as f64) * LN_2PI + half_log_det - 0.5 * quad)
}

/// Log density of the inverse Wishart IW(scale, dof) at `sigma`.
/// Requires dof > d − 1 and SPD arguments.
pub fn iw_log_pdf(sigma: &DenseMatrix, scale: &DenseMatrix, dof: f64) -> Result<f64> {
    let d = scale.rows();
    if sigma.rows() != d || sigma.cols() != d || scale.cols() != d {
        return Err(Error::DimensionMismatch {
            context: "iw_log_pdf",
            expected: d,
            got: sigma.rows(),
        });
    }
    let df = d as f64;
    if dof <= df - 1.0 {
        return Err(Error::InvalidParameter {
            name: "inverse Wishart degrees of freedom",
        });
    }
    let log_det_scale = scale.spd_log_det()?;
    let log_det_sigma = sigma.spd_log_det()?;
    let sigma_inv = sigma.spd_inverse()?;
    // tr(Λ Σ⁻¹) via the Frobenius inner product of two symmetric matrices.
    let trace: f64 = scale
        .as_slice()
        .iter()
        .zip(sigma_inv.as_slice())
        .map(|(a, b)| a * b)
        .sum();
    Ok(0.5 * dof * log_det_scale
        - 0.5 * dof * df * core::f64::consts::LN_2
        - log_multivariate_gamma(d, 0.5 * dof)?
        - 0.5 * (dof + df + 1.0) * log_det_sigma
        - 0.5 * trace)
}

/// One standard normal draw.
#[inline]
pub fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// One Gamma(shape, scale) draw.
fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, scale: f64) -> Result<f64> {
    let g = Gamma::new(shape, scale).map_err(|_| Error::InvalidParameter {
        name: "gamma shape/scale",
    })?;
    Ok(g.sample(rng))
}

/// One draw from N(mean, Σ) with `chol_cov` = chol(Σ).
pub fn sample_mvn<R: Rng + ?Sized>(
    rng: &mut R,
    mean: &[f64],
    chol_cov: &LowerTriangular,
) -> Result<Vec<f64>> {
    let d = chol_cov.dim();
    if mean.len() != d {
        return Err(Error::LengthMismatch {
            context: "sample_mvn",
            left: mean.len(),
            right: d,
        });
    }
    let z: Vec<f64> = (0..d).map(|_| sample_standard_normal(rng)).collect();
    let lz = chol_cov.matvec(&z, false)?;
    Ok(mean.iter().zip(&lz).map(|(m, v)| m + v).collect())
}

/// One draw from IG(shape, rate): `rate / Gamma(shape, scale = 1)`.
pub fn sample_inverse_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, rate: f64) -> Result<f64> {
    if !(shape > 0.0) || !(rate > 0.0) {
        return Err(Error::InvalidParameter {
            name: "inverse gamma shape/rate",
        });
    }
    let g = sample_gamma(rng, shape, 1.0)?;
    Ok(rate / g)
}

/// One draw Σ ~ IW(scale, dof) by the Bartlett decomposition of the Wishart
/// on Σ⁻¹. Requires dof > d − 1.
pub fn sample_inverse_wishart<R: Rng + ?Sized>(
    rng: &mut R,
    scale: &DenseMatrix,
    dof: f64,
) -> Result<DenseMatrix> {
    let d = scale.rows();
    if scale.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: scale.cols(),
            context: "sample_inverse_wishart",
        });
    }
    let df = d as f64;
    if dof <= df - 1.0 {
        return Err(Error::InvalidParameter {
            name: "inverse Wishart degrees of freedom",
        });
    }
    // W = (L A)(L A)ᵀ ~ Wishart(dof, scale⁻¹) with L = chol(scale⁻¹),
    // A lower, A_ii = sqrt(χ²_{dof−i}), A_ij ~ N(0,1).
    let l = scale.spd_inverse()?.cholesky()?;
    let mut a = LowerTriangular::zeros(d);
    for i in 0..d {
        let chi2 = sample_gamma(rng, 0.5 * (dof - i as f64), 2.0)?;
        a.set(i, i, libm::sqrt(chi2));
        for j in 0..i {
            a.set(i, j, sample_standard_normal(rng));
        }
    }
    let mut m = LowerTriangular::zeros(d);
    for i in 0..d {
        for j in 0..=i {
            let mut acc = 0.0;
            for k in j..=i {
                acc += l.get(i, k) * a.get(k, j);
            }
            m.set(i, j, acc);
        }
    }
    // Σ = (M Mᵀ)⁻¹ = M⁻ᵀ M⁻¹; columns of M⁻¹ via forward solves.
    let mut inv_cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        inv_cols.push(m.solve(&e, false)?);
    }
    let mut sigma = DenseMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let v: f64 = inv_cols[i]
                .iter()
                .zip(&inv_cols[j])
                .map(|(a, b)| a * b)
                .sum();
            sigma.set(i, j, v);
            sigma.set(j, i, v);
        }
    }
    Ok(sigma)
}

/// Threshold beyond which the inverse-CDF method for truncated normals loses
/// all precision and the exponential-tilt rejection sampler takes over.
const TAIL_THRESHOLD: f64 = 4.0;

fn sample_truncated_standard<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> Result<f64> {
    if !(a < b) {
        return Err(Error::EmptyInterval);
    }
    if b < -TAIL_THRESHOLD {
        // Mirror the right-tail sampler.
        return Ok(-sample_truncated_standard(rng, -b, -a)?);
    }
    if a > TAIL_THRESHOLD {
        // Exponential tilting (Robert 1995): propose a + Exp(λ) with the
        // optimal rate, accept with exp(−(z−λ)²/2), reject z beyond b.
        let lambda = 0.5 * (a + libm::sqrt(a * a + 4.0));
        loop {
            let u1: f64 = StandardUniform.sample(rng);
            let u2: f64 = StandardUniform.sample(rng);
            let z = a - libm::log(1.0 - u1) / lambda;
            if z <= b && libm::log(u2) <= -0.5 * (z - lambda) * (z - lambda) {
                return Ok(z);
            }
        }
    }
    let pa = if a == f64::NEG_INFINITY { 0.0 } else { norm_cdf(a) };
    let pb = if b == f64::INFINITY { 1.0 } else { norm_cdf(b) };
    if !(pb - pa > 1e-15) {
        // The central window has collapsed in double precision; the interval
        // must hug one tail, where the rejection sampler still works.
        if a >= 0.0 {
            let lambda = 0.5 * (a + libm::sqrt(a * a + 4.0));
            loop {
                let u1: f64 = StandardUniform.sample(rng);
                let u2: f64 = StandardUniform.sample(rng);
                let z = a - libm::log(1.0 - u1) / lambda;
                if z <= b && libm::log(u2) <= -0.5 * (z - lambda) * (z - lambda) {
                    return Ok(z);
                }
            }
        }
        return Ok(-sample_truncated_standard(rng, -b, -a)?);
    }
    let span: f64 = StandardUniform.sample(rng);
    let u = pa + (pb - pa) * span;
    norm_quantile(u.clamp(1e-300, 1.0 - 1e-16))
}

/// One draw from N(mean, sd²) truncated to (lo, hi); either bound may be
/// infinite.
pub fn sample_truncated_normal<R: Rng + ?Sized>(
    rng: &mut R,
    mean: f64,
    sd: f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    if !(sd > 0.0) {
        return Err(Error::InvalidParameter {
            name: "truncated normal sd",
        });
    }
    let a = (lo - mean) / sd;
    let b = (hi - mean) / sd;
    Ok(mean + sd * sample_truncated_standard(rng, a, b)?)
}

/// Systematic-scan Gibbs sampler for N(mean, Q⁻¹) truncated to the positive
/// orthant, parametrized by the precision matrix Q. Returns `count` draws
/// after `burn_in` full sweeps, keeping every `thin`-th sweep thereafter.
pub fn gibbs_truncated_mvn<R: Rng + ?Sized>(
    rng: &mut R,
    mean: &[f64],
    precision: &DenseMatrix,
    burn_in: usize,
    thin: usize,
    count: usize,
) -> Result<Vec<Vec<f64>>> {
    let d = mean.len();
    if precision.rows() != d || precision.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: precision.rows(),
            context: "gibbs_truncated_mvn",
        });
    }
    if thin == 0 {
        return Err(Error::InvalidParameter {
            name: "gibbs thinning interval",
        });
    }
    for i in 0..d {
        if !(precision.get(i, i) > 0.0) {
            return Err(Error::SingularDiagonal { index: i });
        }
    }
    // Start at the mean where it is feasible, else half a conditional sd in.
    let mut x: Vec<f64> = (0..d)
        .map(|i| {
            if mean[i] > 0.0 {
                mean[i]
            } else {
                0.5 / libm::sqrt(precision.get(i, i))
            }
        })
        .collect();
    let sweep = |rng: &mut R, x: &mut Vec<f64>| -> Result<()> {
        for i in 0..d {
            let qii = precision.get(i, i);
            let mut cross = 0.0;
            for j in 0..d {
                if j != i {
                    cross += precision.get(i, j) * (x[j] - mean[j]);
                }
            }
            let cmean = mean[i] - cross / qii;
            let csd = 1.0 / libm::sqrt(qii);
            x[i] = sample_truncated_normal(rng, cmean, csd, 0.0, f64::INFINITY)?;
        }
        Ok(())
    };
    for _ in 0..burn_in {
        sweep(rng, &mut x)?;
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        for _ in 0..thin {
            sweep(rng, &mut x)?;
        }
        out.push(x.clone());
    }
    Ok(out)
}

/// One draw Σ ~ HIW_G(delta, scale) by the clique-sequential construction:
/// the first clique block is inverse Wishart; each later clique draws its
/// conditional given the already-placed separator block; remaining entries
/// are the unique completion with `Σ⁻¹` zero off the graph.
///
/// The graph must be in elimination coordinates matching `scale`. Requires
/// delta > 0.
pub fn sample_hiw<R: Rng + ?Sized>(
    rng: &mut R,
    graph: &DecomposableGraph,
    delta: f64,
    scale: &DenseMatrix,
) -> Result<DenseMatrix> {
    let d = graph.dim();
    if scale.rows() != d || scale.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: scale.rows(),
            context: "sample_hiw",
        });
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "hyper inverse Wishart delta",
        });
    }
    let mut sigma = DenseMatrix::zeros(d, d);
    let mut placed = vec![false; d];

    for (j, clique) in graph.cliques().iter().enumerate() {
        let sep = &graph.separators()[j];
        let fresh: Vec<usize> = clique.iter().copied().filter(|&v| !placed[v]).collect();
        let r = fresh.len();
        let s = sep.len();
        let clique_dof = delta + clique.len() as f64 - 1.0;

        if s == 0 {
            // Disconnected component (or the first clique): a free inverse
            // Wishart block; cross terms with everything placed stay zero.
            let block = sample_inverse_wishart(rng, &scale.submatrix(&fresh, &fresh), clique_dof)?;
            for (bi, &vi) in fresh.iter().enumerate() {
                for (bj, &vj) in fresh.iter().enumerate() {
                    sigma.set(vi, vj, block.get(bi, bj));
                }
            }
        } else {
            // Conditional draw given the separator block already in place:
            //   Γ ~ IW(D_{R|S}, δ + |C| − 1)
            //   B = D_RS D_SS⁻¹ + chol(Γ) Z chol(D_SS⁻¹)ᵀ
            //   Σ_RS = B Σ_SS,   Σ_RR = Γ + B Σ_SS Bᵀ.
            let d_ss = scale.submatrix(sep, sep);
            let d_sr = scale.submatrix(sep, &fresh);
            let d_rr = scale.submatrix(&fresh, &fresh);
            let d_ss_chol = d_ss.cholesky()?;
            // X = D_SS⁻¹ D_SR, one solve per column.
            let mut x_cols: Vec<Vec<f64>> = Vec::with_capacity(r);
            for c in 0..r {
                let col: Vec<f64> = (0..s).map(|rr| d_sr.get(rr, c)).collect();
                x_cols.push(d_ss_chol.solve_spd(&col)?);
            }
            // D_{R|S} = D_RR − D_RS X; the mean of B is Xᵀ.
            let mut d_cond = DenseMatrix::zeros(r, r);
            for i in 0..r {
                for k in 0..r {
                    let mut dot = 0.0;
                    for q in 0..s {
                        dot += d_sr.get(q, i) * x_cols[k][q];
                    }
                    d_cond.set(i, k, d_rr.get(i, k) - dot);
                }
            }
            let gamma = sample_inverse_wishart(rng, &d_cond.symmetrized(), clique_dof)?;
            let l_gamma = gamma.cholesky()?;
            let l_v = d_ss.spd_inverse()?.cholesky()?;
            let mut z = DenseMatrix::zeros(r, s);
            for i in 0..r {
                for q in 0..s {
                    z.set(i, q, sample_standard_normal(rng));
                }
            }
            // B = M₀ + L_Γ Z L_Vᵀ, with M₀ = Xᵀ.
            let mut lz = DenseMatrix::zeros(r, s);
            for i in 0..r {
                for q in 0..s {
                    let mut acc = 0.0;
                    for k in 0..=i {
                        acc += l_gamma.get(i, k) * z.get(k, q);
                    }
                    lz.set(i, q, acc);
                }
            }
            let mut b = DenseMatrix::zeros(r, s);
            for i in 0..r {
                for q in 0..s {
                    let mut noise = 0.0;
                    for t in 0..=q {
                        noise += lz.get(i, t) * l_v.get(q, t);
                    }
                    b.set(i, q, x_cols[i][q] + noise);
                }
            }
            // Current separator block from earlier cliques.
            let sig_ss = sigma.submatrix(sep, sep);
            let sig_rs = b.matmul(&sig_ss)?;
            let sig_rr_noise = sig_rs.matmul(&b.transpose())?;
            for (bi, &vi) in fresh.iter().enumerate() {
                for (bq, &vs) in sep.iter().enumerate() {
                    sigma.set(vi, vs, sig_rs.get(bi, bq));
                    sigma.set(vs, vi, sig_rs.get(bi, bq));
                }
                for (bk, &vk) in fresh.iter().enumerate() {
                    sigma.set(vi, vk, gamma.get(bi, bk) + sig_rr_noise.get(bi, bk));
                }
            }
            // Completion: for each previously placed vertex a outside this
            // clique, Σ_aR = Σ_aS (Σ_SS⁻¹ Σ_SR).
            let sig_ss_chol = sig_ss.cholesky()?;
            let mut k_cols: Vec<Vec<f64>> = Vec::with_capacity(r);
            for c in 0..r {
                let col: Vec<f64> = sep.iter().map(|&vs| sigma.get(vs, fresh[c])).collect();
                k_cols.push(sig_ss_chol.solve_spd(&col)?);
            }
            let outside: Vec<usize> = (0..d)
                .filter(|&a| placed[a] && !clique.contains(&a))
                .collect();
            for &a in &outside {
                let a_s: Vec<f64> = sep.iter().map(|&vs| sigma.get(a, vs)).collect();
                for c in 0..r {
                    let v: f64 = a_s.iter().zip(&k_cols[c]).map(|(p, q)| p * q).sum();
                    sigma.set(a, fresh[c], v);
                    sigma.set(fresh[c], a, v);
                }
            }
        }
        for &v in &fresh {
            placed[v] = true;
        }
    }
    Ok(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use approx::assert_relative_eq;
    use statrs::distribution::{Continuous, InverseGamma, Normal};

    #[test]
    fn scalar_densities_match_reference() {
        let n = Normal::new(1.5, 0.7).unwrap();
        for &x in &[-2.0, 0.0, 1.5, 3.3] {
            assert_relative_eq!(log_normal_pdf(x, 1.5, 0.7), n.ln_pdf(x), epsilon = 1e-12);
        }
        let ig = InverseGamma::new(3.0, 2.5).unwrap();
        for &x in &[0.1, 1.0, 4.0] {
            assert_relative_eq!(
                log_inverse_gamma_pdf(x, 3.0, 2.5),
                ig.ln_pdf(x),
                epsilon = 1e-10
            );
        }
        assert_eq!(log_inverse_gamma_pdf(-1.0, 3.0, 2.5), f64::NEG_INFINITY);
    }

    #[test]
    fn mvn_cov_and_prec_forms_agree() {
        let cov = DenseMatrix::from_rows(&[&[2.0, 0.6], &[0.6, 1.0]]).unwrap();
        let prec = cov.spd_inverse().unwrap();
        let lc = cov.cholesky().unwrap();
        let lp = prec.cholesky().unwrap();
        let mean = [0.3, -0.2];
        for &x in &[[0.0, 0.0], [1.0, -1.5], [-2.0, 0.4]] {
            let a = mvn_log_pdf_chol_cov(&x, &mean, &lc).unwrap();
            let b = mvn_log_pdf_chol_prec(&x, &mean, &lp).unwrap();
            assert_relative_eq!(a, b, epsilon = 1e-10);
        }
        // Diagonal case reduces to a sum of scalar normals.
        let diag = DenseMatrix::from_rows(&[&[4.0, 0.0], &[0.0, 0.25]]).unwrap();
        let ld = diag.cholesky().unwrap();
        let got = mvn_log_pdf_chol_cov(&[1.0, 2.0], &[0.0, 1.0], &ld).unwrap();
        let want = log_normal_pdf(1.0, 0.0, 2.0) + log_normal_pdf(2.0, 1.0, 0.5);
        assert_relative_eq!(got, want, epsilon = 1e-12);
    }

    #[test]
    fn iw_log_pdf_dim_one_is_inverse_gamma() {
        // IW₁(λ, ν) is IG(ν/2, λ/2).
        let lam = 3.0;
        let nu = 7.0;
        for &x in &[0.4, 1.0, 2.7] {
            let sigma = DenseMatrix::from_rows(&[&[x]]).unwrap();
            let scale = DenseMatrix::from_rows(&[&[lam]]).unwrap();
            let got = iw_log_pdf(&sigma, &scale, nu).unwrap();
            let want = log_inverse_gamma_pdf(x, 0.5 * nu, 0.5 * lam);
            assert_relative_eq!(got, want, epsilon = 1e-10);
        }
    }

    #[test]
    fn iw_log_pdf_matches_direct_formula_d2() {
        let scale = DenseMatrix::from_rows(&[&[2.0, 0.3], &[0.3, 1.5]]).unwrap();
        let sigma = DenseMatrix::from_rows(&[&[1.1, -0.2], &[-0.2, 0.9]]).unwrap();
        let nu = 6.0;
        let det_scale = 2.0f64 * 1.5 - 0.09;
        let det_sigma = 1.1f64 * 0.9 - 0.04;
        let inv_sigma = sigma.spd_inverse().unwrap();
        let mut tr = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                tr += scale.get(i, j) * inv_sigma.get(j, i);
            }
        }
        let want = 0.5 * nu * det_scale.ln()
            - 0.5 * nu * 2.0 * core::f64::consts::LN_2
            - log_multivariate_gamma(2, 0.5 * nu).unwrap()
            - 0.5 * (nu + 3.0) * det_sigma.ln()
            - 0.5 * tr;
        assert_relative_eq!(iw_log_pdf(&sigma, &scale, nu).unwrap(), want, epsilon = 1e-10);
    }

    #[test]
    fn mvn_sampler_moments() {
        let cov = DenseMatrix::from_rows(&[&[2.0, 0.6], &[0.6, 1.0]]).unwrap();
        let chol = cov.cholesky().unwrap();
        let mean = [1.0, -2.0];
        let mut r = RngStream::new(11, 0);
        let n = 40_000;
        let mut s = [0.0; 2];
        let mut ss = [[0.0; 2]; 2];
        for _ in 0..n {
            let x = sample_mvn(&mut r, &mean, &chol).unwrap();
            for i in 0..2 {
                s[i] += x[i];
                for j in 0..2 {
                    ss[i][j] += (x[i] - mean[i]) * (x[j] - mean[j]);
                }
            }
        }
        let nf = n as f64;
        for i in 0..2 {
            assert_relative_eq!(s[i] / nf, mean[i], epsilon = 0.05);
            for j in 0..2 {
                assert_relative_eq!(ss[i][j] / nf, cov.get(i, j), epsilon = 0.06);
            }
        }
    }

    #[test]
    fn inverse_gamma_sampler_mean() {
        let mut r = RngStream::new(12, 0);
        let n = 40_000;
        let mut s = 0.0;
        for _ in 0..n {
            s += sample_inverse_gamma(&mut r, 5.0, 3.0).unwrap();
        }
        // Mean = rate / (shape − 1) = 0.75.
        assert_relative_eq!(s / n as f64, 0.75, epsilon = 0.02);
    }

    #[test]
    fn inverse_wishart_sampler_mean() {
        let scale = DenseMatrix::from_rows(&[
            &[2.0, 0.5, 0.0],
            &[0.5, 1.5, -0.3],
            &[0.0, -0.3, 1.0],
        ])
        .unwrap();
        let nu = 10.0;
        let mut r = RngStream::new(13, 0);
        let n = 6000;
        let mut acc = DenseMatrix::zeros(3, 3);
        for _ in 0..n {
            let s = sample_inverse_wishart(&mut r, &scale, nu).unwrap();
            acc = acc.add_scaled(&s, 1.0).unwrap();
        }
        // Mean = scale / (ν − d − 1) = scale / 6.
        for i in 0..3 {
            for j in 0..3 {
                let got = acc.get(i, j) / n as f64;
                let want = scale.get(i, j) / 6.0;
                assert!(
                    (got - want).abs() < 0.05 * (want.abs().max(0.2)),
                    "entry ({i},{j}): got {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn truncated_normal_half_line_moments() {
        // Standard normal on (0, ∞): mean √(2/π), variance 1 − 2/π.
        let mut r = RngStream::new(14, 0);
        let n = 40_000;
        let mut s = 0.0;
        let mut s2 = 0.0;
        for _ in 0..n {
            let x = sample_truncated_normal(&mut r, 0.0, 1.0, 0.0, f64::INFINITY).unwrap();
            assert!(x > 0.0);
            s += x;
            s2 += x * x;
        }
        let nf = n as f64;
        let mean = s / nf;
        let var = s2 / nf - mean * mean;
        let want_mean = (2.0 / core::f64::consts::PI).sqrt();
        assert_relative_eq!(mean, want_mean, epsilon = 0.01);
        assert_relative_eq!(var, 1.0 - 2.0 / core::f64::consts::PI, epsilon = 0.02);
    }

    #[test]
    fn truncated_normal_far_tail() {
        // (6, ∞): hazard-based mean, every draw beyond the bound.
        let a = 6.0;
        let hazard = (crate::special::norm_log_pdf(a) - crate::special::norm_log_cdf(-a)).exp();
        let want_mean = hazard;
        let mut r = RngStream::new(15, 0);
        let n = 20_000;
        let mut s = 0.0;
        for _ in 0..n {
            let x = sample_truncated_normal(&mut r, 0.0, 1.0, a, f64::INFINITY).unwrap();
            assert!(x >= a);
            s += x;
        }
        assert_relative_eq!(s / n as f64, want_mean, epsilon = 0.005);

        // Mirrored far tail.
        let x = sample_truncated_normal(&mut r, 0.0, 1.0, f64::NEG_INFINITY, -6.0).unwrap();
        assert!(x <= -6.0);
    }

    #[test]
    fn truncated_normal_two_sided() {
        // On (−1, 2): mean = (φ(−1) − φ(2)) / (Φ(2) − Φ(−1)).
        let phi = |z: f64| crate::special::norm_log_pdf(z).exp();
        let want = (phi(-1.0) - phi(2.0)) / (norm_cdf(2.0) - norm_cdf(-1.0));
        let mut r = RngStream::new(16, 0);
        let n = 40_000;
        let mut s = 0.0;
        for _ in 0..n {
            let x = sample_truncated_normal(&mut r, 0.0, 1.0, -1.0, 2.0).unwrap();
            assert!(x > -1.0 && x < 2.0);
            s += x;
        }
        assert_relative_eq!(s / n as f64, want, epsilon = 0.01);
    }

    #[test]
    fn gibbs_orthant_matches_rejection_oracle() {
        // Cross-check the Gibbs chain against brute-force rejection from the
        // unconstrained normal restricted to the positive orthant.
        let mean = [0.5, 0.8];
        let prec = DenseMatrix::from_rows(&[&[1.0, -0.3], &[-0.3, 1.0]]).unwrap();
        let cov = prec.spd_inverse().unwrap();
        let chol = cov.cholesky().unwrap();

        let mut r = RngStream::new(17, 0);
        let draws = gibbs_truncated_mvn(&mut r, &mean, &prec, 500, 5, 4000).unwrap();
        assert_eq!(draws.len(), 4000);
        assert!(draws.iter().all(|x| x.iter().all(|&v| v > 0.0)));
        let gibbs_mean: Vec<f64> = (0..2)
            .map(|i| draws.iter().map(|x| x[i]).sum::<f64>() / draws.len() as f64)
            .collect();

        let mut r2 = RngStream::new(17, 1);
        let mut kept = Vec::new();
        while kept.len() < 4000 {
            let x = sample_mvn(&mut r2, &mean, &chol).unwrap();
            if x.iter().all(|&v| v > 0.0) {
                kept.push(x);
            }
        }
        let oracle_mean: Vec<f64> = (0..2)
            .map(|i| kept.iter().map(|x| x[i]).sum::<f64>() / kept.len() as f64)
            .collect();
        for i in 0..2 {
            assert_relative_eq!(gibbs_mean[i], oracle_mean[i], epsilon = 0.04);
        }
    }

    #[test]
    fn hiw_structural_zeros_in_precision() {
        let g = DecomposableGraph::default_benchmark();
        let scale = DenseMatrix::identity(5);
        let mut r = RngStream::new(18, 0);
        for _ in 0..50 {
            let sigma = sample_hiw(&mut r, &g, 3.0, &scale).unwrap();
            let omega = sigma.spd_inverse().unwrap();
            let max_abs = omega
                .as_slice()
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()));
            for i in 0..5 {
                for j in (i + 1)..5 {
                    if !g.is_edge(i, j) {
                        assert!(
                            omega.get(i, j).abs() / max_abs < 1e-9,
                            "nonzero at non-edge ({i},{j}): {}",
                            omega.get(i, j)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn hiw_clique_marginal_means() {
        // Clique marginals are IW(D_C, δ + |C| − 1), mean D_C / (δ − 2).
        // With δ = 4 and D = I the clique-block mean is I_C / 2.
        let g = DecomposableGraph::default_benchmark();
        let scale = DenseMatrix::identity(5);
        let delta = 4.0;
        let mut r = RngStream::new(19, 0);
        let n = 6000;
        let mut acc = DenseMatrix::zeros(5, 5);
        for _ in 0..n {
            let s = sample_hiw(&mut r, &g, delta, &scale).unwrap();
            acc = acc.add_scaled(&s, 1.0).unwrap();
        }
        for clique in g.cliques() {
            for &a in clique {
                for &b in clique {
                    let got = acc.get(a, b) / n as f64;
                    let want = if a == b { 1.0 / (delta - 2.0) } else { 0.0 };
                    assert!(
                        (got - want).abs() < 0.05,
                        "clique entry ({a},{b}): got {got}, want {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn hiw_complete_graph_reduces_to_inverse_wishart() {
        let g = DecomposableGraph::complete(3).unwrap();
        let scale = DenseMatrix::from_rows(&[
            &[1.5, 0.4, 0.0],
            &[0.4, 1.2, 0.2],
            &[0.0, 0.2, 1.0],
        ])
        .unwrap();
        let delta = 5.0;
        // HIW on a complete graph is IW(scale, δ + d − 1); compare means.
        let dof = delta + 2.0;
        let mut r = RngStream::new(20, 0);
        let n = 6000;
        let mut acc_h = DenseMatrix::zeros(3, 3);
        let mut acc_i = DenseMatrix::zeros(3, 3);
        for _ in 0..n {
            acc_h = acc_h
                .add_scaled(&sample_hiw(&mut r, &g, delta, &scale).unwrap(), 1.0)
                .unwrap();
            acc_i = acc_i
                .add_scaled(&sample_inverse_wishart(&mut r, &scale, dof).unwrap(), 1.0)
                .unwrap();
        }
        for i in 0..3 {
            for j in 0..3 {
                let want = scale.get(i, j) / (dof - 4.0);
                assert!((acc_h.get(i, j) / n as f64 - want).abs() < 0.08 * want.abs().max(0.3));
                assert!((acc_i.get(i, j) / n as f64 - want).abs() < 0.08 * want.abs().max(0.3));
            }
        }
    }

    #[test]
    fn hiw_empty_graph_is_diagonal() {
        let g = DecomposableGraph::empty_graph(3).unwrap();
        let scale = DenseMatrix::identity(3);
        let delta = 5.0;
        let mut r = RngStream::new(21, 0);
        let n = 6000;
        let mut diag_acc = [0.0; 3];
        for _ in 0..n {
            let s = sample_hiw(&mut r, &g, delta, &scale).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        assert_eq!(s.get(i, j), 0.0);
                    }
                }
                diag_acc[i] += s.get(i, i);
            }
        }
        // Each diagonal is IW₁(1, δ) = IG(δ/2, 1/2), mean 1/(δ − 2).
        for &v in &diag_acc {
            assert_relative_eq!(v / n as f64, 1.0 / (delta - 2.0), epsilon = 0.02);
        }
    }
}
