//! Dense small-matrix kernel.
//!
//! Row-major [`Matrix`] with the handful of operations the certificate checks
//! need. Eigenvalues and linear solves are delegated to `nalgebra`; the
//! Cholesky definiteness test and the Kronecker-form Lyapunov solve are local.

use std::fmt;
use std::ops::Index;

use nalgebra::{Complex, DMatrix};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("ragged rows: row {row} has {got} entries, expected {expected}")]
    Ragged {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("singular Lyapunov operator: eigenvalues {0} and {1} of A sum to (nearly) zero")]
    SingularLyapunov(String, String),
    #[error("linear system is singular")]
    Singular,
}

/// Dense real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(LinalgError::Ragged {
                    row: i,
                    got: r.len(),
                    expected: cols,
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

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
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * other[(k, j)]).sum()
        }))
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    pub fn plus(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn minus(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `self + s·I`.
    pub fn shifted(&self, s: f64) -> Matrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m.data[i * self.cols + i] += s;
        }
        m
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let tol = 1e-12 * self.max_abs();
        (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    /// `(M + Mᵀ)/2`.
    pub fn symmetrized(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            0.5 * (self[(i, j)] + self[(j, i)])
        })
    }

    /// `xᵀ M x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        (0..self.rows)
            .map(|i| x[i] * (0..self.cols).map(|j| self[(i, j)] * x[j]).sum::<f64>())
            .sum()
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Matrix {
        Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    fn require_square(&self) -> Result<(), LinalgError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    /// Config syntax: `a,b; c,d`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
        }
        Ok(())
    }
}

/// Eigenvalues of a real square matrix, sorted by decreasing real part, then
/// decreasing imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<Complex<f64>>,
}

impl Spectrum {
    pub fn values(&self) -> &[Complex<f64>] {
        &self.values
    }

    pub fn max_real(&self) -> f64 {
        self.values
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl fmt::Display for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, z) in self.values.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            if z.im == 0.0 {
                write!(f, "{:.6}", z.re)?;
            } else {
                write!(f, "{:.6}{:+.6}i", z.re, z.im)?;
            }
        }
        Ok(())
    }
}

/// Eigenvalues via a real Schur decomposition (shifted QR).
pub fn eigenvalues(a: &Matrix) -> Result<Spectrum, LinalgError> {
    a.require_square()?;
    if a.rows == 0 {
        return Ok(Spectrum { values: vec![] });
    }
    let mut values: Vec<Complex<f64>> = a
        .to_nalgebra()
        .complex_eigenvalues()
        .iter()
        .copied()
        .collect();
    // Schur 2x2 blocks give exact conjugates; snap tiny imaginary noise.
    let scale = a.max_abs().max(1.0);
    for z in values.iter_mut() {
        if z.im.abs() <= 1e-14 * scale {
            z.im = 0.0;
        }
    }
    values.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    Ok(Spectrum { values })
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(s: &Matrix) -> Result<Vec<f64>, LinalgError> {
    s.require_square()?;
    let mut v: Vec<f64> = s
        .symmetrized()
        .to_nalgebra()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Symmetric and every Cholesky pivot exceeds `tol`.
pub fn is_positive_definite(p: &Matrix, tol: f64) -> bool {
    p.is_symmetric() && cholesky_pivots(p).iter().all(|d| *d > tol)
}

/// Squared diagonal pivots `d_k` of the Cholesky sweep. The sweep stops at
/// the first non-positive pivot, which is the last element returned.
pub fn cholesky_pivots(p: &Matrix) -> Vec<f64> {
    let n = p.rows;
    let mut l = vec![0.0; n * n];
    let mut pivots = Vec::with_capacity(n);
    for j in 0..n {
        let d = p[(j, j)] - (0..j).map(|k| l[j * n + k] * l[j * n + k]).sum::<f64>();
        pivots.push(d);
        if d <= 0.0 {
            break;
        }
        let root = d.sqrt();
        l[j * n + j] = root;
        for i in j + 1..n {
            let s = p[(i, j)] - (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum::<f64>();
            l[i * n + j] = s / root;
        }
    }
    pivots
}

/// Solves `AᵀP + PA = -Q` through the `n²×n²` vectorized system
/// `(I⊗Aᵀ + Aᵀ⊗I) vec(P) = -vec(Q)`.
pub fn solve_lyapunov(a: &Matrix, q: &Matrix) -> Result<Matrix, LinalgError> {
    a.require_square()?;
    q.require_square()?;
    let n = a.rows;
    if q.rows != n {
        return Err(LinalgError::DimensionMismatch(format!(
            "A is {n}x{n} but Q is {}x{}",
            q.rows, q.cols
        )));
    }

    // λ_i + λ_j = 0 makes the operator singular.
    let spec = eigenvalues(a)?;
    let scale = a.max_abs().max(1.0);
    for (i, x) in spec.values.iter().enumerate() {
        for y in &spec.values[i..] {
            if (x + y).norm() <= 1e-10 * scale {
                return Err(LinalgError::SingularLyapunov(
                    format!("{x}"),
                    format!("{y}"),
                ));
            }
        }
    }

    // Column-major vec: vec(P)[i + j n] = P[i, j].
    let at = a.transpose();
    let mut op = DMatrix::<f64>::zeros(n * n, n * n);
    for j in 0..n {
        for i in 0..n {
            let row = i + j * n;
            for k in 0..n {
                // (AᵀP)[i,j] = Σ_k Aᵀ[i,k] P[k,j]
                op[(row, k + j * n)] += at[(i, k)];
                // (PA)[i,j] = Σ_k P[i,k] A[k,j]
                op[(row, i + k * n)] += a[(k, j)];
            }
        }
    }
    let rhs = nalgebra::DVector::from_fn(n * n, |r, _| -q[(r % n, r / n)]);
    let sol = op.lu().solve(&rhs).ok_or(LinalgError::Singular)?;
    let p = Matrix::from_fn(n, n, |i, j| sol[i + j * n]);
    Ok(p.symmetrized())
}

/// Numerical rank from singular values above `rel_tol · σ_max`.
pub fn rank(m: &Matrix, rel_tol: f64) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    let sv = m.to_nalgebra().singular_values();
    let smax = sv.iter().fold(0.0f64, |a, b| a.max(*b));
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel_tol * smax).count()
}

/// Solves `M x = b` for square `M`.
pub fn solve(m: &Matrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    m.require_square()?;
    if b.len() != m.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "right-hand side has {} entries for a {}x{} system",
            b.len(),
            m.rows,
            m.cols
        )));
    }
    let rhs = nalgebra::DVector::from_column_slice(b);
    let x = m
        .to_nalgebra()
        .lu()
        .solve(&rhs)
        .ok_or(LinalgError::Singular)?;
    Ok(x.iter().copied().collect())
}
