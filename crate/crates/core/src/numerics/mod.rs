//! Dense complex linear algebra: vectors, matrices, Hermitian/unitary
//! eigendecomposition, Hermitian matrix exponentials, tensor products.
//!
//! Everything is a plain value on the heap (`Vec<Complex64>`), row-major.
//! All operations are pure; nothing here is tuned beyond what desk-scale
//! dimensions (a few thousand at most) need.

mod eig;

pub use eig::{eig_hermitian, eig_unitary, exp_from_decomposition, exp_hermitian, EigenDecomposition};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default tolerance for unitarity checks (max-norm of `U†U - 1`).
pub const TOL_UNITARY: f64 = 1e-10;
/// Default tolerance for Hermiticity checks (max-norm of `H - H†`).
pub const TOL_HERMITIAN: f64 = 1e-10;
/// Tolerance for vector normalization checks.
pub const TOL_NORMALIZED: f64 = 1e-12;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// ---------------------------------------------------------------------------
// CVector
// ---------------------------------------------------------------------------

/// Dense complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    pub entries: Vec<Complex64>,
}

impl CVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    /// Computational basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut v = Self::zeros(dim);
        v.entries[index] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self {
            entries: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Inner product `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &CVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// Errors with `UnnormalizedVector` unless `| ‖v‖ - 1 | <= tol`.
    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        if self.is_normalized(tol) {
            Ok(())
        } else {
            Err(Error::UnnormalizedVector { norm: self.norm() })
        }
    }

    pub fn normalized(&self) -> CVector {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        self.scaled(Complex64::new(1.0 / n, 0.0))
    }

    pub fn scaled(&self, f: Complex64) -> CVector {
        CVector::new(self.entries.iter().map(|x| x * f).collect())
    }

    pub fn add(&self, other: &CVector) -> CVector {
        assert_eq!(self.dim(), other.dim());
        CVector::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &CVector) -> CVector {
        assert_eq!(self.dim(), other.dim());
        CVector::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// `self += f * other`, in place.
    pub fn axpy(&mut self, f: Complex64, other: &CVector) {
        assert_eq!(self.dim(), other.dim());
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += f * b;
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CVector) -> CVector {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            for b in &other.entries {
                out.push(a * b);
            }
        }
        CVector::new(out)
    }
}

// ---------------------------------------------------------------------------
// CMatrix
// ---------------------------------------------------------------------------

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub entries: Vec<Complex64>,
    pub rows: usize,
    pub cols: usize,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
            rows,
            cols,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Square matrix with the given (complex) diagonal.
    pub fn diag(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn diag_real(d: &[f64]) -> Self {
        Self::diag(&d.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a -= b;
        }
        out
    }

    pub fn scaled(&self, f: Complex64) -> CMatrix {
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a *= f;
        }
        out
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        // ikj order keeps the inner loop contiguous in both operands
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let orow = &other.entries[k * other.cols..(k + 1) * other.cols];
                let crow = &mut out.entries[i * other.cols..(i + 1) * other.cols];
                for (c, &b) in crow.iter_mut().zip(orow) {
                    *c += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &CVector) -> CVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        let mut out = CVector::zeros(self.rows);
        for i in 0..self.rows {
            let row = &self.entries[i * self.cols..(i + 1) * self.cols];
            out.entries[i] = row.iter().zip(&v.entries).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector::new((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn set_column(&mut self, j: usize, v: &CVector) {
        assert_eq!(v.dim(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v.entries[i];
        }
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Max-norm (largest entry modulus).
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-norm of `U†U - 1`.
    pub fn unitarity_deviation(&self) -> f64 {
        assert!(self.is_square());
        self.adjoint().mul(self).sub(&CMatrix::identity(self.rows)).max_abs()
    }

    /// Max-norm of `H - H†`.
    pub fn hermiticity_deviation(&self) -> f64 {
        assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn check_unitary(&self, tol: f64) -> Result<()> {
        let deviation = self.unitarity_deviation();
        if deviation <= tol {
            Ok(())
        } else {
            Err(Error::NonUnitary { deviation, tol })
        }
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let deviation = self.hermiticity_deviation();
        if deviation <= tol {
            Ok(())
        } else {
            Err(Error::NonHermitian { deviation, tol })
        }
    }

    /// Determinant via LU with partial pivoting.
    pub fn det(&self) -> Complex64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.entries.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let (pivot_row, pivot_abs) = (k..n)
                .map(|i| (i, a[i * n + k].norm()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            if pivot_abs == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if pivot_row != k {
                for j in 0..n {
                    a.swap(k * n + j, pivot_row * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k..n {
                    let akj = a[k * n + j];
                    a[i * n + j] -= f * akj;
                }
            }
        }
        det
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

// ---------------------------------------------------------------------------
// Tensor structure
// ---------------------------------------------------------------------------

/// Kronecker product `A ⊗ B`; the first factor is the most significant.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for ia in 0..a.rows {
        for ja in 0..a.cols {
            let f = a[(ia, ja)];
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for ib in 0..b.rows {
                for jb in 0..b.cols {
                    out[(ia * b.rows + ib, ja * b.cols + jb)] = f * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Rank-1 projector `|v><v|` for a normalized `v`.
pub fn projector(v: &CVector) -> CMatrix {
    let n = v.dim();
    CMatrix::from_fn(n, n, |i, j| v.entries[i] * v.entries[j].conj())
}
