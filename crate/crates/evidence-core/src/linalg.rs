//! Dense small-matrix linear algebra: row-major matrices, Cholesky
//! factorization, triangular solves, and SPD helpers.
//!
//! Sizes here are small (dimensions up to a few dozen); everything is plain
//! O(d³) with no blocking. Symmetric-input operations verify symmetry to a
//! 1e-10 relative tolerance and then symmetrize as (M + Mᵀ)/2 before
//! factorizing, because posterior-parameter arithmetic accumulates asymmetry.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Relative tolerance for the symmetry check in [`DenseMatrix::cholesky`].
const SYMMETRY_REL_TOL: f64 = 1e-10;

/// Dense row-major matrix of `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major data. `data.len()` must equal
    /// `rows * cols` and both dimensions must be at least 1.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyInput("matrix dimensions"));
        }
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                context: "DenseMatrix::new",
                left: rows * cols,
                right: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix from nested row slices (all rows must share a length).
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput("matrix rows"));
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::LengthMismatch {
                    context: "DenseMatrix::from_rows",
                    left: cols,
                    right: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    /// Row-major backing slice.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matmul",
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self * v`.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                context: "matvec",
                expected: self.cols,
                got: v.len(),
            });
        }
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Entrywise `self + scale * other`.
    pub fn add_scaled(&self, other: &DenseMatrix, scale: f64) -> Result<DenseMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context: "add_scaled",
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + scale * b)
            .collect();
        DenseMatrix::new(self.rows, self.cols, data)
    }

    /// Submatrix with the given row and column index sets.
    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(row_idx.len().max(1), col_idx.len().max(1));
        for (i, &r) in row_idx.iter().enumerate() {
            for (j, &c) in col_idx.iter().enumerate() {
                out.set(i, j, self.get(r, c));
            }
        }
        out
    }

    /// Quadratic form `x' * self * x` (square matrices).
    pub fn quadratic_form(&self, x: &[f64]) -> Result<f64> {
        let mx = self.matvec(x)?;
        Ok(x.iter().zip(&mx).map(|(a, b)| a * b).sum())
    }

    /// Maximum relative asymmetry `|m_ij - m_ji| / scale` where `scale` is the
    /// largest absolute entry (0 for the zero matrix).
    pub fn max_rel_asymmetry(&self) -> f64 {
        let scale = self.data.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in (r + 1)..self.cols.min(self.rows) {
                worst = worst.max((self.get(r, c) - self.get(c, r)).abs() / scale);
            }
        }
        worst
    }

    /// `(M + Mᵀ)/2` for square matrices.
    pub fn symmetrized(&self) -> DenseMatrix {
        let mut out = self.clone();
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, 0.5 * (self.get(r, c) + self.get(c, r)));
            }
        }
        out
    }

    /// Cholesky factorization of a symmetric positive-definite matrix:
    /// returns lower-triangular `L` with `L·Lᵀ = self`.
    ///
    /// The input is checked for symmetry (1e-10 relative) and symmetrized
    /// before factorizing. A non-positive pivot reports the failing index.
    pub fn cholesky(&self) -> Result<LowerTriangular> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                context: "cholesky",
                expected: self.rows,
                got: self.cols,
            });
        }
        let asym = self.max_rel_asymmetry();
        if asym > SYMMETRY_REL_TOL {
            return Err(Error::NotSymmetric { max_rel_asym: asym });
        }
        let m = self.symmetrized();
        let n = self.rows;
        let mut l = LowerTriangular::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut acc = m.get(i, j);
                for k in 0..j {
                    acc -= l.get(i, k) * l.get(j, k);
                }
                if i == j {
                    if acc <= 0.0 {
                        return Err(Error::NotPositiveDefinite { pivot: i });
                    }
                    l.set(i, i, libm::sqrt(acc));
                } else {
                    l.set(i, j, acc / l.get(j, j));
                }
            }
        }
        Ok(l)
    }

    /// Inverse of a symmetric positive-definite matrix via Cholesky solves;
    /// the result is symmetrized.
    pub fn spd_inverse(&self) -> Result<DenseMatrix> {
        let l = self.cholesky()?;
        let n = self.rows;
        let mut inv = DenseMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let x = l.solve_spd(&e)?;
            for i in 0..n {
                inv.set(i, j, x[i]);
            }
            e[j] = 0.0;
        }
        Ok(inv.symmetrized())
    }

    /// log det of a symmetric positive-definite matrix via Cholesky.
    pub fn spd_log_det(&self) -> Result<f64> {
        Ok(self.cholesky()?.log_det_gram())
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }
}

/// Lower-triangular matrix in packed row-major storage (strict lower entries
/// plus diagonal). When representing a Cholesky factor the diagonal entries
/// are strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerTriangular {
    dim: usize,
    /// Packed entries: (0,0), (1,0), (1,1), (2,0), ...
    data: Vec<f64>,
}

impl LowerTriangular {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * (dim + 1) / 2],
        }
    }

    /// Identity factor.
    pub fn identity(dim: usize) -> Self {
        let mut l = Self::zeros(dim);
        for i in 0..dim {
            l.set(i, i, 1.0);
        }
        l
    }

    /// Builds from packed data `(0,0), (1,0), (1,1), (2,0), …`.
    pub fn from_packed(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * (dim + 1) / 2 {
            return Err(Error::LengthMismatch {
                context: "LowerTriangular::from_packed",
                left: dim * (dim + 1) / 2,
                right: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Packed backing slice.
    pub fn as_packed(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    fn idx(i: usize, j: usize) -> usize {
        debug_assert!(j <= i);
        i * (i + 1) / 2 + j
    }

    /// Entry (i, j) for j ≤ i.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[Self::idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[Self::idx(i, j)] = v;
    }

    /// Expands to a dense matrix with zeros above the diagonal.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in 0..=i {
                m.set(i, j, self.get(i, j));
            }
        }
        m
    }

    /// `L · Lᵀ`.
    pub fn gram(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in 0..=i {
                let mut acc = 0.0;
                for k in 0..=j.min(i) {
                    acc += self.get(i, k) * self.get(j, k);
                }
                m.set(i, j, acc);
                m.set(j, i, acc);
            }
        }
        m
    }

    /// log det(L·Lᵀ) = 2·Σ log l_ii — the log-determinant of the SPD matrix
    /// this factor reconstructs.
    pub fn log_det_gram(&self) -> f64 {
        2.0 * (0..self.dim).map(|i| libm::log(self.get(i, i))).sum::<f64>()
    }

    /// `L · x` (or `Lᵀ · x` when `transposed`).
    pub fn matvec(&self, x: &[f64], transposed: bool) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "LowerTriangular::matvec",
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut out = vec![0.0; self.dim];
        for i in 0..self.dim {
            for j in 0..=i {
                if transposed {
                    out[j] += self.get(i, j) * x[i];
                } else {
                    out[i] += self.get(i, j) * x[j];
                }
            }
        }
        Ok(out)
    }

    /// Solves `L x = b` (forward substitution), or `Lᵀ x = b` when
    /// `transposed` (back substitution). Errors on a zero diagonal entry.
    pub fn solve(&self, b: &[f64], transposed: bool) -> Result<Vec<f64>> {
        if b.len() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "LowerTriangular::solve",
                expected: self.dim,
                got: b.len(),
            });
        }
        for i in 0..self.dim {
            if self.get(i, i) == 0.0 {
                return Err(Error::SingularDiagonal { index: i });
            }
        }
        let n = self.dim;
        let mut x = vec![0.0; n];
        if !transposed {
            for i in 0..n {
                let mut acc = b[i];
                for j in 0..i {
                    acc -= self.get(i, j) * x[j];
                }
                x[i] = acc / self.get(i, i);
            }
        } else {
            for ir in (0..n).rev() {
                let mut acc = b[ir];
                for j in (ir + 1)..n {
                    acc -= self.get(j, ir) * x[j];
                }
                x[ir] = acc / self.get(ir, ir);
            }
        }
        Ok(x)
    }

    /// Solves `(L·Lᵀ) x = b` by forward then back substitution.
    pub fn solve_spd(&self, b: &[f64]) -> Result<Vec<f64>> {
        let y = self.solve(b, false)?;
        self.solve(&y, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn rng() -> impl rand::Rng {
        use rand::SeedableRng;
        rand_chacha::ChaCha8Rng::seed_from_u64(7)
    }

    fn random_spd(n: usize, r: &mut impl Rng) -> DenseMatrix {
        // A = G·Gᵀ + n·I is comfortably positive definite.
        let mut g = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g.set(i, j, r.random_range(-1.0..1.0));
            }
        }
        let mut a = g.matmul(&g.transpose()).unwrap();
        for i in 0..n {
            a.set(i, i, a.get(i, i) + n as f64);
        }
        a
    }

    /// Brute-force determinant by cofactor expansion (test oracle).
    fn cofactor_det(m: &DenseMatrix) -> f64 {
        let n = m.rows();
        if n == 1 {
            return m.get(0, 0);
        }
        let mut acc = 0.0;
        for c in 0..n {
            let rows: alloc::vec::Vec<usize> = (1..n).collect();
            let cols: alloc::vec::Vec<usize> = (0..n).filter(|&j| j != c).collect();
            let minor = m.submatrix(&rows, &cols);
            let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * m.get(0, c) * cofactor_det(&minor);
        }
        acc
    }

    #[test]
    fn cholesky_identity() {
        let l = DenseMatrix::identity(3).cholesky().unwrap();
        assert_eq!(l.to_dense(), DenseMatrix::identity(3));
    }

    #[test]
    fn cholesky_hand_2x2() {
        // [[4,2],[2,3]] → [[2,0],[1,√2]] by the 2×2 recursion.
        let m = DenseMatrix::from_rows(&[&[4.0, 2.0], &[2.0, 3.0]]).unwrap();
        let l = m.cholesky().unwrap();
        assert_relative_eq!(l.get(0, 0), 2.0, max_relative = 1e-15);
        assert_relative_eq!(l.get(1, 0), 1.0, max_relative = 1e-15);
        assert_relative_eq!(l.get(1, 1), 2.0f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn cholesky_reconstructs_random_spd() {
        let mut r = rng();
        for n in [2, 3, 6, 12, 25] {
            let a = random_spd(n, &mut r);
            let l = a.cholesky().unwrap();
            let back = l.gram();
            let diff = back.add_scaled(&a, -1.0).unwrap();
            assert!(
                diff.frobenius_norm() / a.frobenius_norm() < 1e-10,
                "reconstruction failed at n={n}"
            );
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
        match m.cholesky() {
            Err(Error::NotPositiveDefinite { pivot }) => assert_eq!(pivot, 1),
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn cholesky_rejects_asymmetric() {
        let m = DenseMatrix::from_rows(&[&[1.0, 0.5], &[0.0, 1.0]]).unwrap();
        assert!(matches!(m.cholesky(), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn log_det_identity_and_diag() {
        assert_eq!(LowerTriangular::identity(4).log_det_gram(), 0.0);
        let mut l = LowerTriangular::zeros(2);
        l.set(0, 0, 2.0);
        l.set(1, 1, 3.0);
        assert_relative_eq!(
            l.log_det_gram(),
            2.0 * (2.0f64.ln() + 3.0f64.ln()),
            max_relative = 1e-15
        );
    }

    #[test]
    fn log_det_matches_cofactor_expansion() {
        let mut r = rng();
        let a = random_spd(5, &mut r);
        let l = a.cholesky().unwrap();
        let oracle = cofactor_det(&a).ln();
        assert_relative_eq!(l.log_det_gram(), oracle, max_relative = 1e-9);
    }

    #[test]
    fn solve_identity_and_hand_case() {
        let l = LowerTriangular::identity(3);
        let b = [1.0, -2.0, 3.0];
        assert_eq!(l.solve(&b, false).unwrap(), b.to_vec());

        // [[2,0],[1,1]] x = (2,3) → x = (1,2) by forward substitution.
        let mut l = LowerTriangular::zeros(2);
        l.set(0, 0, 2.0);
        l.set(1, 0, 1.0);
        l.set(1, 1, 1.0);
        assert_eq!(l.solve(&[2.0, 3.0], false).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn solve_residual_random() {
        let mut r = rng();
        let a = random_spd(6, &mut r);
        let l = a.cholesky().unwrap();
        let b: alloc::vec::Vec<f64> = (0..6).map(|_| r.random_range(-2.0..2.0)).collect();
        for transposed in [false, true] {
            let x = l.solve(&b, transposed).unwrap();
            let back = l.matvec(&x, transposed).unwrap();
            let bmax = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let resid = back
                .iter()
                .zip(&b)
                .fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
            assert!(resid < 1e-10 * bmax, "residual {resid} too large");
        }
    }

    #[test]
    fn solve_rejects_singular() {
        let l = LowerTriangular::zeros(2);
        assert!(matches!(
            l.solve(&[1.0, 1.0], false),
            Err(Error::SingularDiagonal { index: 0 })
        ));
    }

    #[test]
    fn spd_inverse_roundtrip() {
        let mut r = rng();
        let a = random_spd(5, &mut r);
        let inv = a.spd_inverse().unwrap();
        let prod = a.matmul(&inv).unwrap();
        let diff = prod.add_scaled(&DenseMatrix::identity(5), -1.0).unwrap();
        assert!(diff.frobenius_norm() < 1e-10);
    }
}
