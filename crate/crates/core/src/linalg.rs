//! Small dense matrices and the minimum-norm solver for the normal equations.
//!
//! The Gram matrices involved are at most a few dozen rows, so a cyclic
//! Jacobi eigensolver is accurate and fast enough.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds from row-major data. Panics if the length does not match.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self::from_row_major(r, c, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    /// `Σ_ij self_ij · other_ij`, i.e. `Tr(selfᵀ other)`.
    pub fn frobenius_dot(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|v| *v *= s);
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == 0.0)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigen-decomposition `S = V diag(λ) Vᵀ` of a symmetric matrix.
/// Columns of the returned matrix are the eigenvectors.
pub fn symmetric_eigen(s: &Matrix) -> (Vec<f64>, Matrix) {
    let n = s.rows();
    assert_eq!(n, s.cols(), "eigen of a non-square matrix");
    let mut a = s.clone();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return (vec![0.0; n], v);
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if libm::sqrt(off) <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }
    let eig = (0..n).map(|i| a[(i, i)]).collect();
    (eig, v)
}

/// Relative cutoff `sqrt(machine epsilon)` applied to the largest singular value.
pub fn default_cutoff() -> f64 {
    libm::sqrt(f64::EPSILON)
}

/// Minimum-Frobenius-norm solution `X = G⁺ Z` of `G X = Z` for symmetric
/// positive semidefinite `G`. Eigenvalues below `rel_cutoff · λ_max` are
/// treated as zero.
pub fn pinv_solve_psd(g: &Matrix, z: &Matrix, rel_cutoff: f64) -> Matrix {
    let n = g.rows();
    assert_eq!(n, z.rows(), "normal equations shape mismatch");
    let (eig, v) = symmetric_eigen(g);
    let lmax = eig.iter().fold(0.0_f64, |m, &l| m.max(l.abs()));
    let mut x = Matrix::zeros(n, z.cols());
    if lmax == 0.0 {
        return x;
    }
    let cut = rel_cutoff * lmax;
    // X = Σ_i v_i (v_iᵀ Z) / λ_i over retained eigenpairs
    let mut proj = vec![0.0; z.cols()];
    for (i, &lambda) in eig.iter().enumerate() {
        if lambda <= cut {
            continue;
        }
        proj.fill(0.0);
        for r in 0..n {
            let vr = v[(r, i)];
            if vr == 0.0 {
                continue;
            }
            for (c, p) in proj.iter_mut().enumerate() {
                *p += vr * z[(r, c)];
            }
        }
        for r in 0..n {
            let vr = v[(r, i)] / lambda;
            if vr == 0.0 {
                continue;
            }
            for (c, p) in proj.iter().enumerate() {
                x[(r, c)] += vr * p;
            }
        }
    }
    x
}
