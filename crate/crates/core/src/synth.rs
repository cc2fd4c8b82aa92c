//! State-feedback synthesis `u = Kx` and closed-loop verification.
//!
//! Single-input pairs use Ackermann's formula. Multi-input pairs are reduced
//! to a single input `B·v` after a random pre-feedback `K0`, which makes
//! `(A + BK0, Bv)` controllable for almost every draw.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{eigenvalues, rank, solve, solve_lyapunov, LinalgError, Matrix, Spectrum};
use crate::lincheck::{
    check_linear_condition, find_certificate, linear_ground_truth, CertificateSearch, GroundTruth,
    LinearCheckReport, LinearCondition, LinearError,
};

/// Bounded retries of the multi-input reduction.
pub const MAX_ATTEMPTS: u64 = 32;

/// Seed of the multi-input reduction when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("(A, B) is not controllable: controllability matrix has rank {rank} < {n}")]
    Uncontrollable { rank: usize, n: usize },
    #[error("gamma must be positive and finite, got {0}")]
    InvalidGamma(f64),
    #[error("invalid target poles: {0}")]
    InvalidPoles(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("synthesis failed: {0}")]
    Failed(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Linear(#[from] LinearError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    /// `m×n` gain of `u = Kx`.
    pub k: Matrix,
    pub p: Matrix,
    pub spectrum: Spectrum,
    pub gamma: f64,
    pub poles: Vec<f64>,
    pub certificate: LinearCheckReport,
    pub attempts: u64,
}

/// `−γ/2 − 1 − j` for `j = 0..n`.
pub fn default_poles(n: usize, gamma: f64) -> Vec<f64> {
    (0..n).map(|j| -gamma / 2.0 - 1.0 - j as f64).collect()
}

fn check_pair(a: &Matrix, b: &Matrix) -> Result<(), SynthError> {
    if !a.is_square() {
        return Err(SynthError::DimensionMismatch(format!(
            "A must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if b.rows() != a.rows() || b.cols() == 0 {
        return Err(SynthError::DimensionMismatch(format!(
            "B is {}x{} but A is {}x{}",
            b.rows(),
            b.cols(),
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

/// `[B, AB, …, A^{n-1}B]`.
pub fn controllability_matrix(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.rows();
    let m = b.cols();
    let mut out = Matrix::zeros(n, n * m);
    let mut block = b.clone();
    for k in 0..n {
        for i in 0..n {
            for j in 0..m {
                out.set(i, k * m + j, block[(i, j)]);
            }
        }
        block = a.matmul(&block).expect("square A");
    }
    out
}

pub fn is_controllable(a: &Matrix, b: &Matrix) -> bool {
    rank(&controllability_matrix(a, b), 1e-10) == a.rows()
}

/// Ackermann's formula for a single input column `b`: `K = −e_nᵀ C⁻¹ φ(A)`.
fn ackermann(a: &Matrix, b: &Matrix, poles: &[f64]) -> Result<Matrix, SynthError> {
    let n = a.rows();
    let c = controllability_matrix(a, b);
    let mut e_n = vec![0.0; n];
    e_n[n - 1] = 1.0;
    let w = solve(&c.transpose(), &e_n)?;
    let mut phi = Matrix::identity(n);
    for &p in poles {
        phi = phi.matmul(&a.shifted(-p))?;
    }
    let row = Matrix::new(1, n, w)?.matmul(&phi)?;
    Ok(row.scaled(-1.0))
}

/// Places the closed-loop poles at [`default_poles`].
pub fn synthesize_state_feedback(
    a: &Matrix,
    b: &Matrix,
    gamma: f64,
) -> Result<SynthesisResult, SynthError> {
    let poles = default_poles(a.rows(), gamma);
    synthesize_with_poles(a, b, gamma, &poles, DEFAULT_SEED)
}

/// Places the closed-loop poles at the given real values, each below `−γ/2`,
/// and certifies `(A+BK)ᵀP + P(A+BK) + γP < 0`.
pub fn synthesize_with_poles(
    a: &Matrix,
    b: &Matrix,
    gamma: f64,
    poles: &[f64],
    seed: u64,
) -> Result<SynthesisResult, SynthError> {
    check_pair(a, b)?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(SynthError::InvalidGamma(gamma));
    }
    let n = a.rows();
    let m = b.cols();
    if poles.len() != n {
        return Err(SynthError::InvalidPoles(format!(
            "expected {n} poles, got {}",
            poles.len()
        )));
    }
    if let Some(p) = poles
        .iter()
        .find(|&&p| p.partial_cmp(&(-gamma / 2.0)) != Some(Ordering::Less))
    {
        return Err(SynthError::InvalidPoles(format!(
            "pole {p} is not below -gamma/2 = {}",
            -gamma / 2.0
        )));
    }
    let c = controllability_matrix(a, b);
    let r = rank(&c, 1e-10);
    if r < n {
        return Err(SynthError::Uncontrollable { rank: r, n });
    }

    let cond = LinearCondition::Corollary1 { gamma };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = String::from("no attempt made");
    let attempts = if m == 1 { 1 } else { MAX_ATTEMPTS };
    for attempt in 0..attempts {
        let (k0, v) = if m == 1 {
            (Matrix::zeros(1, n), Matrix::identity(1))
        } else {
            let k0 = if attempt == 0 {
                Matrix::zeros(m, n)
            } else {
                let data = (0..m * n).map(|_| rng.random_range(-1.0..1.0)).collect();
                Matrix::new(m, n, data)?
            };
            let data = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
            (k0, Matrix::new(m, 1, data)?)
        };
        let a0 = a.plus(&b.matmul(&k0)?)?;
        let bv = b.matmul(&v)?;
        if !is_controllable(&a0, &bv) {
            last = "reduced single-input pair is not controllable".into();
            continue;
        }
        let k = k0.plus(&v.matmul(&ackermann(&a0, &bv, poles)?)?)?;
        let acl = a.plus(&b.matmul(&k)?)?;
        let spectrum = eigenvalues(&acl)?;
        if spectrum.max_real().partial_cmp(&(-gamma / 2.0 - 1e-9)) != Some(Ordering::Less) {
            last = format!("placed spectrum has max real part {}", spectrum.max_real());
            continue;
        }
        let p = solve_lyapunov(&acl.shifted(gamma / 2.0), &Matrix::identity(n))?;
        let certificate = check_linear_condition(&acl, &p, cond)?;
        if !(certificate.holds_strict() && certificate.p_positive_definite) {
            last = format!("certificate re-check returned {}", certificate.state);
            continue;
        }
        return Ok(SynthesisResult {
            k,
            p,
            spectrum,
            gamma,
            poles: poles.to_vec(),
            certificate,
            attempts: attempt + 1,
        });
    }
    Err(SynthError::Failed(last))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoopReport {
    pub closed_loop: Matrix,
    pub spectrum: Spectrum,
    pub ground_truth: GroundTruth,
    /// Check of the supplied `P`, or of the searched one.
    pub check: Option<LinearCheckReport>,
    pub search: Option<CertificateSearch>,
    /// The inequality holds strictly with a positive definite `P` although
    /// the closed loop is unstable.
    pub unsound: bool,
}

pub fn verify_closed_loop(
    a: &Matrix,
    b: &Matrix,
    k: &Matrix,
    cond: LinearCondition,
    p: Option<&Matrix>,
) -> Result<ClosedLoopReport, SynthError> {
    check_pair(a, b)?;
    if k.rows() != b.cols() || k.cols() != a.rows() {
        return Err(SynthError::DimensionMismatch(format!(
            "K is {}x{} but must be {}x{}",
            k.rows(),
            k.cols(),
            b.cols(),
            a.rows()
        )));
    }
    let acl = a.plus(&b.matmul(k)?)?;
    let spectrum = eigenvalues(&acl)?;
    let ground_truth = linear_ground_truth(&acl)?;
    let (check, search) = match p {
        Some(p) => (Some(check_linear_condition(&acl, p, cond)?), None),
        None => match find_certificate(&acl, cond) {
            Ok(s) => (s.report.clone().filter(|_| s.found()), Some(s)),
            Err(LinearError::NotSearchable(_)) => (None, None),
            Err(e) => return Err(e.into()),
        },
    };
    let unsound = check
        .as_ref()
        .is_some_and(|c| c.holds_strict() && c.p_positive_definite)
        && ground_truth == GroundTruth::Unstable;
    Ok(ClosedLoopReport {
        closed_loop: acl,
        spectrum,
        ground_truth,
        check,
        search,
        unsound,
    })
}
