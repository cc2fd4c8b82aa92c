//! Matrix-inequality conditions for `ẋ = Ax` and certificate search.
//!
//! Every supported inequality has the form `AᵀP + PA + cP < 0` for a scalar
//! `c` fixed by the condition and `A`. Completing the shift gives
//! `ÃᵀP + PÃ < 0` with `Ã = A + (c/2)I`, so a positive definite certificate
//! exists iff `Ã` is Hurwitz, and `P = lyap(Ã, I)` is one.

use std::fmt;

use thiserror::Error;

use crate::linalg::{
    eigenvalues, is_positive_definite, solve_lyapunov, symmetric_eigenvalues, LinalgError, Matrix,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinearError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("P must be symmetric")]
    NotSymmetric,
    #[error("no certificate search is offered for {0}")]
    NotSearchable(&'static str),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinearCondition {
    /// `AᵀP + PA < α⁻¹·tr(A)·P`.
    RantzerEq7 { alpha: f64 },
    /// `AᵀP + PA + α⁻¹·tr(A)·P < 0`.
    Eq07 { alpha: f64 },
    /// `AᵀP + PA − κ·tr(A)·P < 0`, with `tr(A) ≤ 0` required when `κ > 0`.
    Theorem7 { kappa: f64 },
    /// `AᵀP + PA + γP < 0`.
    Corollary1 { gamma: f64 },
}

impl LinearCondition {
    pub fn validate(&self) -> Result<(), LinearError> {
        let bad = |m: String| Err(LinearError::InvalidParameter(m));
        match *self {
            Self::RantzerEq7 { alpha } | Self::Eq07 { alpha }
                if !(alpha > 0.0 && alpha.is_finite()) =>
            {
                bad(format!("alpha must be positive, got {alpha}"))
            }
            Self::Theorem7 { kappa } if !(kappa >= 0.0 && kappa.is_finite()) => {
                bad(format!("kappa must be non-negative, got {kappa}"))
            }
            Self::Corollary1 { gamma } if !(gamma > 0.0 && gamma.is_finite()) => {
                bad(format!("gamma must be positive, got {gamma}"))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::RantzerEq7 { .. } => "RANTZER_EQ7",
            Self::Eq07 { .. } => "EQ07",
            Self::Theorem7 { .. } => "THEOREM7",
            Self::Corollary1 { .. } => "COROLLARY1",
        }
    }

    pub fn parameter(&self) -> (&'static str, f64) {
        match *self {
            Self::RantzerEq7 { alpha } | Self::Eq07 { alpha } => ("alpha", alpha),
            Self::Theorem7 { kappa } => ("kappa", kappa),
            Self::Corollary1 { gamma } => ("gamma", gamma),
        }
    }

    /// The `c` in `AᵀP + PA + cP`.
    pub fn coefficient(&self, a: &Matrix) -> f64 {
        let tr = a.trace();
        match *self {
            Self::RantzerEq7 { alpha } => -tr / alpha,
            Self::Eq07 { alpha } => tr / alpha,
            Self::Theorem7 { kappa } => -kappa * tr,
            Self::Corollary1 { gamma } => gamma,
        }
    }

    /// `Ã = A + (c/2)I`.
    pub fn shifted_matrix(&self, a: &Matrix) -> Matrix {
        a.shifted(self.coefficient(a) / 2.0)
    }

    /// `tr(A) ≤ 0` when the condition needs it, `None` otherwise.
    pub fn trace_side_condition(&self, a: &Matrix) -> Option<bool> {
        match *self {
            Self::Theorem7 { kappa } if kappa > 0.0 => {
                Some(a.trace() <= 1e-12 * (1.0 + a.max_abs()))
            }
            _ => None,
        }
    }
}

impl fmt::Display for LinearCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (k, v) = self.parameter();
        write!(f, "{} {k}={v}", self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriState {
    SatisfiedStrict,
    Boundary,
    Violated,
}

impl TriState {
    /// `m` is the largest eigenvalue of the slack matrix.
    pub fn classify(m: f64, tol: f64) -> Self {
        if m < -tol {
            Self::SatisfiedStrict
        } else if m <= tol {
            Self::Boundary
        } else {
            Self::Violated
        }
    }
}

impl fmt::Display for TriState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SatisfiedStrict => "SATISFIED_STRICT",
            Self::Boundary => "BOUNDARY",
            Self::Violated => "VIOLATED",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearCheckReport {
    pub condition: LinearCondition,
    pub state: TriState,
    /// `AᵀP + PA + cP`.
    pub slack: Matrix,
    pub max_eigenvalue: f64,
    pub min_eigenvalue: f64,
    pub tol: f64,
    pub p_positive_definite: bool,
    pub trace: f64,
    pub trace_side_ok: Option<bool>,
}

impl LinearCheckReport {
    /// Strict inequality, including the trace requirement where it applies.
    pub fn holds_strict(&self) -> bool {
        self.state == TriState::SatisfiedStrict && self.trace_side_ok != Some(false)
    }
}

fn check_square(a: &Matrix) -> Result<(), LinearError> {
    if !a.is_square() {
        return Err(LinearError::DimensionMismatch(format!(
            "A must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

pub fn check_linear_condition(
    a: &Matrix,
    p: &Matrix,
    cond: LinearCondition,
) -> Result<LinearCheckReport, LinearError> {
    cond.validate()?;
    check_square(a)?;
    if p.rows() != a.rows() || p.cols() != a.cols() {
        return Err(LinearError::DimensionMismatch(format!(
            "P is {}x{} but A is {}x{}",
            p.rows(),
            p.cols(),
            a.rows(),
            a.cols()
        )));
    }
    if !p.is_symmetric() {
        return Err(LinearError::NotSymmetric);
    }
    let c = cond.coefficient(a);
    let slack = a
        .transpose()
        .matmul(p)?
        .plus(&p.matmul(a)?)?
        .plus(&p.scaled(c))?
        .symmetrized();
    let eig = symmetric_eigenvalues(&slack)?;
    let tol = 1e-9 * (1.0 + slack.max_abs());
    let max_eigenvalue = *eig.last().expect("non-empty spectrum");
    Ok(LinearCheckReport {
        condition: cond,
        state: TriState::classify(max_eigenvalue, tol),
        min_eigenvalue: eig[0],
        max_eigenvalue,
        tol,
        p_positive_definite: is_positive_definite(p, 1e-12 * p.max_abs()),
        trace: a.trace(),
        trace_side_ok: cond.trace_side_condition(a),
        slack,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateSearch {
    pub shifted: Matrix,
    pub shifted_max_real: f64,
    pub trace_side_ok: Option<bool>,
    pub p: Option<Matrix>,
    pub report: Option<LinearCheckReport>,
}

impl CertificateSearch {
    pub fn found(&self) -> bool {
        self.p.is_some()
    }
}

/// Searches a strict certificate for THEOREM7 or COROLLARY1.
///
/// A candidate is only returned after it re-checks strictly and is positive
/// definite.
pub fn find_certificate(
    a: &Matrix,
    cond: LinearCondition,
) -> Result<CertificateSearch, LinearError> {
    cond.validate()?;
    check_square(a)?;
    if let LinearCondition::RantzerEq7 { .. } | LinearCondition::Eq07 { .. } = cond {
        return Err(LinearError::NotSearchable(cond.name()));
    }
    let shifted = cond.shifted_matrix(a);
    let shifted_max_real = eigenvalues(&shifted)?.max_real();
    let trace_side_ok = cond.trace_side_condition(a);
    let mut search = CertificateSearch {
        shifted,
        shifted_max_real,
        trace_side_ok,
        p: None,
        report: None,
    };
    if shifted_max_real >= 0.0 || trace_side_ok == Some(false) {
        return Ok(search);
    }
    let n = a.rows();
    let Ok(p) = solve_lyapunov(&search.shifted, &Matrix::identity(n)) else {
        return Ok(search);
    };
    let report = check_linear_condition(a, &p, cond)?;
    if report.holds_strict() && report.p_positive_definite {
        search.p = Some(p);
    }
    search.report = Some(report);
    Ok(search)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroundTruth {
    Stable,
    Marginal,
    Unstable,
}

impl fmt::Display for GroundTruth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Stable => "STABLE",
            Self::Marginal => "MARGINAL",
            Self::Unstable => "UNSTABLE",
        })
    }
}

/// Classifies `ẋ = Ax` by the largest real part of the spectrum.
pub fn linear_ground_truth(a: &Matrix) -> Result<GroundTruth, LinearError> {
    check_square(a)?;
    let m = eigenvalues(a)?.max_real();
    let tol = 1e-9 * (1.0 + a.max_abs());
    Ok(if m > tol {
        GroundTruth::Unstable
    } else if m >= -tol {
        GroundTruth::Marginal
    } else {
        GroundTruth::Stable
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[[f64; 2]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn unstable_matrix_satisfies_eq7() {
        let a = m(&[[0.0, 1.0], [1.0, 1.0]]);
        let p = m(&[[0.6, 0.3], [0.3, 0.9]]);
        let r = check_linear_condition(&a, &p, LinearCondition::RantzerEq7 { alpha: 0.2 }).unwrap();
        assert_eq!(r.state, TriState::SatisfiedStrict);
        assert!(r.p_positive_definite);
        let want = m(&[[-2.4, 0.3], [0.3, -2.1]]);
        for i in 0..2 {
            for j in 0..2 {
                assert!((r.slack[(i, j)] - want[(i, j)]).abs() < 1e-12);
            }
        }
        // eigenvalues of the slack: -2.25 ± sqrt(0.0225 + 0.09)
        assert!((r.max_eigenvalue - (-2.25 + 0.1125f64.sqrt())).abs() < 1e-12);
        assert_eq!(linear_ground_truth(&a).unwrap(), GroundTruth::Unstable);
    }

    #[test]
    fn non_definite_p_gives_boundary() {
        let a = m(&[[0.0, 1.0], [-1.0, -1.0]]);
        let p = m(&[[-1.5, -0.75], [-0.75, -1.5]]);
        let r = check_linear_condition(&a, &p, LinearCondition::RantzerEq7 { alpha: 1.0 }).unwrap();
        assert_eq!(r.state, TriState::Boundary);
        assert!(!r.p_positive_definite);
        assert!(r.slack.max_abs() < 1e-15);
    }

    #[test]
    fn corollary1_on_identity() {
        let a = Matrix::identity(2).scaled(-1.0);
        let r = check_linear_condition(
            &a,
            &Matrix::identity(2),
            LinearCondition::Corollary1 { gamma: 1.0 },
        )
        .unwrap();
        assert_eq!(r.state, TriState::SatisfiedStrict);
        assert_eq!(r.max_eigenvalue, -1.0);
    }

    #[test]
    fn certificate_search_examples() {
        let unstable = m(&[[0.0, 1.0], [1.0, 1.0]]);
        let s = find_certificate(&unstable, LinearCondition::Theorem7 { kappa: 0.0 }).unwrap();
        assert!(!s.found());
        assert!((s.shifted_max_real - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);

        let stable = m(&[[0.0, 1.0], [-1.0, -1.0]]);
        let s = find_certificate(&stable, LinearCondition::Corollary1 { gamma: 0.5 }).unwrap();
        assert!(s.found());
        assert!((s.shifted_max_real + 0.25).abs() < 1e-12);
        let p = s.p.unwrap();
        let r = check_linear_condition(&stable, &p, LinearCondition::Corollary1 { gamma: 0.5 })
            .unwrap();
        assert_eq!(r.state, TriState::SatisfiedStrict);

        let s = find_certificate(&stable, LinearCondition::Corollary1 { gamma: 2.0 }).unwrap();
        assert!(!s.found());
        assert!((s.shifted_max_real - 0.5).abs() < 1e-12);
    }

    #[test]
    fn theorem7_trace_side_condition() {
        // κ·tr(A) < 0 shifts the spectrum right: A + I is not Hurwitz.
        let a = m(&[[1.0, 0.0], [0.0, -3.0]]);
        let s = find_certificate(&a, LinearCondition::Theorem7 { kappa: 1.0 }).unwrap();
        assert_eq!(s.trace_side_ok, Some(true));
        assert!((s.shifted_max_real - 2.0).abs() < 1e-12);
        assert!(!s.found());
        let a = m(&[[0.5, 0.0], [0.0, -0.1]]);
        let s = find_certificate(&a, LinearCondition::Theorem7 { kappa: 2.0 }).unwrap();
        assert_eq!(s.trace_side_ok, Some(false));
        assert!(!s.found());
    }

    #[test]
    fn eq7_is_not_searchable() {
        let a = Matrix::identity(2);
        assert!(matches!(
            find_certificate(&a, LinearCondition::RantzerEq7 { alpha: 1.0 }),
            Err(LinearError::NotSearchable(_))
        ));
    }

    #[test]
    fn ground_truth_examples() {
        assert_eq!(
            linear_ground_truth(&m(&[[0.0, 1.0], [-1.0, -1.0]])).unwrap(),
            GroundTruth::Stable
        );
        assert_eq!(
            linear_ground_truth(&m(&[[0.0, 1.0], [-1.0, 0.0]])).unwrap(),
            GroundTruth::Marginal
        );
    }

    #[test]
    fn parameter_validation() {
        let a = Matrix::identity(2);
        assert!(check_linear_condition(&a, &a, LinearCondition::Eq07 { alpha: 0.0 }).is_err());
        assert!(check_linear_condition(&a, &a, LinearCondition::Theorem7 { kappa: -1.0 }).is_err());
        assert!(
            check_linear_condition(&a, &a, LinearCondition::Corollary1 { gamma: 0.0 }).is_err()
        );
        let asym = m(&[[1.0, 2.0], [0.0, 1.0]]);
        assert_eq!(
            check_linear_condition(&a, &asym, LinearCondition::Eq07 { alpha: 1.0 }),
            Err(LinearError::NotSymmetric)
        );
    }
}
