//! Dense linear algebra for small Hermitian and real matrices.
//!
//! Everything here is sized for matrices of order at most a few dozen: a
//! cyclic Jacobi eigensolver for complex Hermitian input, a one-sided Jacobi
//! SVD for real rectangular input, and the positivity and rank queries built
//! on top of them. No external backend is involved, so results are
//! reproducible across platforms.

use num_complex::Complex64;
use thiserror::Error;

/// Hard cap on Jacobi sweeps before reporting failure.
const MAX_SWEEPS: usize = 100;

/// Errors raised by the linear algebra kernels.
#[derive(Debug, Error)]
pub enum LinalgError {
    /// Input was expected to be Hermitian and is not, within the tolerance.
    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {residual:.3e} exceeds {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },
    /// The sweep budget ran out before the off-diagonal part vanished.
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    /// NaN or infinity in the input.
    #[error("matrix contains non-finite entries")]
    NonFinite,
    /// Rows of inconsistent length or operands of mismatched order.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Square complex matrix in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    order: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            data: vec![Complex64::new(0.0, 0.0); order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            for j in 0..order {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from rows, which must form a square array.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self, LinalgError> {
        let order = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(LinalgError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {order}",
                    row.len()
                )));
            }
        }
        Ok(Self {
            order,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Rank-one projector `v v†` (no normalization applied).
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.order, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order, "operand orders differ");
        let mut out = Self::zeros(self.order);
        for i in 0..self.order {
            for k in 0..self.order {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..self.order {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order, "operand orders differ");
        Self::from_fn(self.order, |i, j| self[(i, j)] + other[(i, j)])
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order, "operand orders differ");
        Self::from_fn(self.order, |i, j| self[(i, j)] - other[(i, j)])
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_fn(self.order, |i, j| self[(i, j)] * factor)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.order).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from the adjoint.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.order {
            for j in i..self.order {
                let dev = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.order, other.order, "operand orders differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `(a + a†) / 2`, exactly Hermitian by construction.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.order, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.order + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.order + j]
    }
}

/// Rectangular real matrix in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order, order);
        for i in 0..order {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, LinalgError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(LinalgError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {n_cols}",
                    row.len()
                )));
            }
        }
        Ok(Self {
            rows: n_rows,
            cols: n_cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "vector length does not match columns");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Result of [`hermitian_eigen`]: `a = V diag(w) V†` with `w` ascending and
/// the columns of `V` orthonormal.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn eigenvector(&self, j: usize) -> Vec<Complex64> {
        (0..self.eigenvectors.order())
            .map(|i| self.eigenvectors[(i, j)])
            .collect()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.eigenvectors.order();
        ComplexMatrix::from_fn(d, |i, j| {
            (0..d)
                .map(|k| {
                    self.eigenvectors[(i, k)]
                        * self.eigenvalues[k]
                        * self.eigenvectors[(j, k)].conj()
                })
                .sum()
        })
    }
}

/// Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi
/// rotations.
///
/// The input must be Hermitian within `tol` entrywise; it is symmetrized
/// before iterating so the decomposition itself is exact to machine
/// precision. Eigenvalues come back ascending.
pub fn hermitian_eigen(m: &ComplexMatrix, tol: f64) -> Result<EigenDecomposition, LinalgError> {
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let residual = m.hermiticity_residual();
    if !(residual <= tol) {
        return Err(LinalgError::NotHermitian { residual, tol });
    }
    let d = m.order();
    let mut a = m.hermitian_part();
    let mut w = ComplexMatrix::identity(d);
    let scale = a.frobenius_norm();
    if d < 2 || scale == 0.0 {
        let eigenvalues = (0..d).map(|i| a[(i, i)].re).collect();
        return Ok(EigenDecomposition {
            eigenvalues,
            eigenvectors: w,
        });
    }
    // Rotations below this size cannot change the spectrum at double
    // precision, so a sweep that applies none of them means convergence.
    let stop = f64::EPSILON * scale;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = 0usize;
        for p in 0..d - 1 {
            for q in p + 1..d {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= stop {
                    continue;
                }
                rotated += 1;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let ph = apq / r;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..d {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    let new_kp = akp * (ph * c) - akq * s;
                    let new_kq = akp * (ph * s) + akq * c;
                    a[(k, p)] = new_kp;
                    a[(p, k)] = new_kp.conj();
                    a[(k, q)] = new_kq;
                    a[(q, k)] = new_kq.conj();
                }
                a[(p, p)] = Complex64::new(app - t * r, 0.0);
                a[(q, q)] = Complex64::new(aqq + t * r, 0.0);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                for k in 0..d {
                    let wkp = w[(k, p)];
                    let wkq = w[(k, q)];
                    w[(k, p)] = wkp * (ph * c) - wkq * s;
                    w[(k, q)] = wkp * (ph * s) + wkq * c;
                }
            }
        }
        if rotated == 0 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence { sweeps: MAX_SWEEPS });
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(d, |i, j| w[(i, order[j])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Whether a Hermitian matrix has all eigenvalues at or above `-tol`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<bool, LinalgError> {
    let eigen = hermitian_eigen(m, tol)?;
    Ok(eigen.eigenvalues.first().is_none_or(|&lo| lo >= -tol))
}

/// Thin singular value decomposition `m = U diag(s) Vᵀ` with `s` descending.
///
/// `u` is `rows x k` and `v` is `cols x k` for `k = min(rows, cols)`. Columns
/// of `u` belonging to zero singular values are zero.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: RealMatrix,
    pub singular_values: Vec<f64>,
    pub v: RealMatrix,
}

impl Svd {
    /// Number of singular values above `rel_cutoff` times the largest.
    pub fn rank(&self, rel_cutoff: f64) -> usize {
        match self.singular_values.first() {
            Some(&top) if top > 0.0 => self
                .singular_values
                .iter()
                .filter(|&&s| s > rel_cutoff * top)
                .count(),
            _ => 0,
        }
    }

    /// Minimum-norm least squares solution of `m x = b`, truncating singular
    /// values at `rel_cutoff` times the largest.
    pub fn solve_min_norm(&self, b: &[f64], rel_cutoff: f64) -> Vec<f64> {
        assert_eq!(b.len(), self.u.rows(), "right-hand side length mismatch");
        let n = self.v.rows();
        let mut x = vec![0.0; n];
        let Some(&top) = self.singular_values.first() else {
            return x;
        };
        if top <= 0.0 {
            return x;
        }
        for (j, &s) in self.singular_values.iter().enumerate() {
            if s <= rel_cutoff * top {
                continue;
            }
            let proj: f64 = (0..self.u.rows()).map(|i| self.u[(i, j)] * b[i]).sum();
            let coeff = proj / s;
            for (i, entry) in x.iter_mut().enumerate() {
                *entry += coeff * self.v[(i, j)];
            }
        }
        x
    }
}

/// One-sided Jacobi SVD of a real rectangular matrix.
///
/// Plane rotations orthogonalize the columns in place, which keeps tiny
/// singular values near machine precision instead of flooring them at the
/// square root of it, as forming the Gram matrix would.
pub fn svd(m: &RealMatrix) -> Result<Svd, LinalgError> {
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    if m.rows() < m.cols() {
        let t = svd(&m.transpose())?;
        return Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }
    let rows = m.rows();
    let cols = m.cols();
    let mut b = m.clone();
    let mut v = RealMatrix::identity(cols);
    if cols > 0 {
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            let mut rotated = 0usize;
            for p in 0..cols.saturating_sub(1) {
                for q in p + 1..cols {
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = 0.0;
                    for i in 0..rows {
                        let bp = b[(i, p)];
                        let bq = b[(i, q)];
                        alpha += bp * bp;
                        beta += bq * bq;
                        gamma += bp * bq;
                    }
                    if gamma == 0.0 || gamma * gamma <= 1.0e-30 * alpha * beta {
                        continue;
                    }
                    rotated += 1;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = if zeta >= 0.0 {
                        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                    } else {
                        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for i in 0..rows {
                        let bp = b[(i, p)];
                        let bq = b[(i, q)];
                        b[(i, p)] = c * bp - s * bq;
                        b[(i, q)] = s * bp + c * bq;
                    }
                    for i in 0..cols {
                        let vp = v[(i, p)];
                        let vq = v[(i, q)];
                        v[(i, p)] = c * vp - s * vq;
                        v[(i, q)] = s * vp + c * vq;
                    }
                }
            }
            if rotated == 0 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(LinalgError::NoConvergence { sweeps: MAX_SWEEPS });
        }
    }
    let mut norms: Vec<f64> = (0..cols)
        .map(|j| (0..rows).map(|i| b[(i, j)] * b[(i, j)]).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());
    norms = order.iter().map(|&j| norms[j]).collect();
    let mut u = RealMatrix::zeros(rows, cols);
    let mut v_sorted = RealMatrix::zeros(cols, cols);
    for (dst, &src) in order.iter().enumerate() {
        if norms[dst] > 0.0 {
            for i in 0..rows {
                u[(i, dst)] = b[(i, src)] / norms[dst];
            }
        }
        for i in 0..cols {
            v_sorted[(i, dst)] = v[(i, src)];
        }
    }
    Ok(Svd {
        u,
        singular_values: norms,
        v: v_sorted,
    })
}

/// Number of singular values exceeding `tol` times the largest one.
///
/// A matrix of all zeros has rank zero. Only non-finite input is an error.
pub fn numerical_rank(m: &RealMatrix, tol: f64) -> Result<usize, LinalgError> {
    Ok(svd(m)?.rank(tol))
}
