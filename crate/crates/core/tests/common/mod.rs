//! Oracles shared by the integration tests. They avoid the library's
//! eigen and Cholesky paths: stability goes through the characteristic
//! polynomial and a Routh array, definiteness through leading minors.

#![allow(dead_code)]

use divstab::expr::VectorField;
use divstab::Matrix;
use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.random_range(lo..hi)).collect();
    Matrix::new(rows, cols, data).unwrap()
}

/// A point with `r_min <= |x| <= r_max`, direction uniform on the sphere.
pub fn annulus_point(rng: &mut ChaCha8Rng, n: usize, r_min: f64, r_max: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 && norm <= 1.0 {
            let r = rng.random_range(r_min..r_max);
            return v.iter().map(|x| x * r / norm).collect();
        }
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Coefficients `[1, a1, .., an]` of `det(λI − A)` by Faddeev–LeVerrier.
pub fn char_poly(a: &Matrix) -> Vec<f64> {
    let n = a.rows();
    let mut coeffs = vec![1.0];
    let mut m = Matrix::zeros(n, n);
    let mut c = 1.0;
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{k−1}·I
        m = a
            .matmul(&m)
            .unwrap()
            .plus(&Matrix::identity(n).scaled(c))
            .unwrap();
        c = -a.matmul(&m).unwrap().trace() / k as f64;
        coeffs.push(c);
    }
    coeffs
}

/// Routh criterion: every root of the polynomial has negative real part.
/// A zero in the first column counts as not stable.
pub fn routh_stable(coeffs: &[f64]) -> bool {
    let n = coeffs.len() - 1;
    if n == 0 {
        return true;
    }
    if coeffs.iter().any(|c| *c <= 0.0) {
        return false;
    }
    let width = n / 2 + 1;
    let mut prev: Vec<f64> = (0..width)
        .map(|i| coeffs.get(2 * i).copied().unwrap_or(0.0))
        .collect();
    let mut cur: Vec<f64> = (0..width)
        .map(|i| coeffs.get(2 * i + 1).copied().unwrap_or(0.0))
        .collect();
    for _ in 1..n {
        if cur[0] <= 0.0 {
            return false;
        }
        let next: Vec<f64> = (0..width)
            .map(|i| {
                let p1 = prev.get(i + 1).copied().unwrap_or(0.0);
                let c1 = cur.get(i + 1).copied().unwrap_or(0.0);
                (cur[0] * p1 - prev[0] * c1) / cur[0]
            })
            .collect();
        prev = cur;
        cur = next;
    }
    cur[0] > 0.0
}

pub fn hurwitz(a: &Matrix) -> bool {
    routh_stable(&char_poly(a))
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut d = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))
            .unwrap();
        if m[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            m.swap(p, k);
            d = -d;
        }
        d *= m[k][k];
        let pivot = m[k].clone();
        for row in &mut m[k + 1..] {
            let f = row[k] / pivot[k];
            for (dst, src) in row[k..].iter_mut().zip(&pivot[k..]) {
                *dst -= f * src;
            }
        }
    }
    d
}

/// Sylvester: all leading principal minors positive.
pub fn sylvester_pd(p: &Matrix) -> bool {
    let n = p.rows();
    (1..=n).all(|k| det(&Matrix::from_fn(k, k, |i, j| p[(i, j)])) > 0.0)
}

/// `det(A − λI)` for complex `λ`.
pub fn complex_char_det(a: &Matrix, lambda: Complex<f64>) -> Complex<f64> {
    let n = a.rows();
    let mut m: Vec<Vec<Complex<f64>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    Complex::new(a[(i, j)], 0.0)
                        - if i == j {
                            lambda
                        } else {
                            Complex::new(0.0, 0.0)
                        }
                })
                .collect()
        })
        .collect();
    let mut d = Complex::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i][k].norm().total_cmp(&m[j][k].norm()))
            .unwrap();
        if m[p][k].norm() == 0.0 {
            return Complex::new(0.0, 0.0);
        }
        if p != k {
            m.swap(p, k);
            d = -d;
        }
        d *= m[k][k];
        let pivot = m[k].clone();
        for row in &mut m[k + 1..] {
            let f = row[k] / pivot[k];
            for (dst, src) in row[k..].iter_mut().zip(&pivot[k..]) {
                *dst -= f * src;
            }
        }
    }
    d
}

/// Eigenvalues of a symmetric 2x2 matrix, larger first.
pub fn sym2_eigs(m: &Matrix) -> (f64, f64) {
    let (a, b, d) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    let mid = (a + d) / 2.0;
    let rad = (((a - d) / 2.0).powi(2) + b * b).sqrt();
    (mid + rad, mid - rad)
}

pub fn ex1(c: f64) -> VectorField {
    VectorField::parse(&["x2".to_string(), format!("-({c})*x1 - x1^2*x2 - x2^3")]).unwrap()
}

pub fn ex2(b: f64) -> VectorField {
    VectorField::parse(&["-x1".to_string(), format!("{b}*x2 - x1^2*x2")]).unwrap()
}

pub fn ex3() -> VectorField {
    VectorField::parse(&["-x1 + x1^2 - x2^2", "-x2 + 2*x1*x2"]).unwrap()
}

pub fn ex4() -> VectorField {
    VectorField::parse(&["x2 - 2*x1*x3^2", "-x1 - 2*x2*x3^2", "-2*x3^3"]).unwrap()
}

/// Hand-written right-hand sides of the four example fields.
pub fn ex1_rhs(c: f64, x: &[f64]) -> Vec<f64> {
    let (x1, x2) = (x[0], x[1]);
    vec![x2, -c * x1 - x1 * x1 * x2 - x2.powi(3)]
}

pub fn ex2_rhs(b: f64, x: &[f64]) -> Vec<f64> {
    vec![-x[0], b * x[1] - x[0] * x[0] * x[1]]
}

pub fn ex3_rhs(x: &[f64]) -> Vec<f64> {
    let (x1, x2) = (x[0], x[1]);
    vec![-x1 + x1 * x1 - x2 * x2, -x2 + 2.0 * x1 * x2]
}

pub fn ex4_rhs(x: &[f64]) -> Vec<f64> {
    let (x1, x2, x3) = (x[0], x[1], x[2]);
    vec![
        x2 - 2.0 * x1 * x3 * x3,
        -x1 - 2.0 * x2 * x3 * x3,
        -2.0 * x3.powi(3),
    ]
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) || a == b
}
