//! Sampled sign checks of `div{ρf}` and `div{ρ⁻¹f}` over annular regions.
//!
//! A check evaluates one or more symbolic expressions on a seeded point set
//! and classifies the signs it sees. `Status::HoldsOnSamples` only says that
//! no counterexample was found among the evaluated samples.

mod checks;
mod flux;
mod limits;
pub mod sampling;

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::density::DensityError;
use crate::exec::Exec;
use crate::expr::{EvalError, FieldError};

pub use checks::{
    check_closed_loop, check_necessary_c1, check_necessary_c2, check_sufficient, check_theorem1,
    Theorem1Case,
};
pub use flux::{flux_sphere_estimate, FluxEstimate};
pub use limits::{IntegrabilityEstimate, LimitCheck, LIMIT_ZERO};
pub use sampling::sample_region;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckError {
    #[error("region radii must satisfy 0 < r_min < r_max, got [{r_min}, {r_max}]")]
    InvalidRadii { r_min: f64, r_max: f64 },
    #[error("region dimension must be between 1 and {max}, got {dim}")]
    InvalidDimension { dim: usize, max: usize },
    #[error("invalid box bounds: {0}")]
    InvalidBox(String),
    #[error("invalid check configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("case {case} is not defined for {check}")]
    InvalidCase { check: &'static str, case: u8 },
    #[error("gradient of S vanishes at {point:?}")]
    ZeroGradient { point: Vec<f64> },
    #[error("S is not positive at {point:?} (value {value})")]
    NonPositiveScalar { point: Vec<f64>, value: f64 },
    #[error("no sample points fall inside the region")]
    EmptyRegion,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Origin-centred annulus `r_min ≤ |x| ≤ r_max`, optionally intersected with
/// an axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    dim: usize,
    r_min: f64,
    r_max: f64,
    bounds: Option<Vec<(f64, f64)>>,
}

impl Region {
    pub fn annulus(dim: usize, r_min: f64, r_max: f64) -> Result<Self, CheckError> {
        if dim == 0 || dim > sampling::MAX_DIM {
            return Err(CheckError::InvalidDimension {
                dim,
                max: sampling::MAX_DIM,
            });
        }
        if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
            return Err(CheckError::InvalidRadii { r_min, r_max });
        }
        Ok(Self {
            dim,
            r_min,
            r_max,
            bounds: None,
        })
    }

    pub fn with_box(mut self, bounds: Vec<(f64, f64)>) -> Result<Self, CheckError> {
        if bounds.len() != self.dim {
            return Err(CheckError::InvalidBox(format!(
                "expected {} intervals, got {}",
                self.dim,
                bounds.len()
            )));
        }
        if let Some((lo, hi)) = bounds
            .iter()
            .find(|(lo, hi)| lo.partial_cmp(hi) != Some(Ordering::Less))
        {
            return Err(CheckError::InvalidBox(format!(
                "empty interval [{lo}, {hi}]"
            )));
        }
        self.bounds = Some(bounds);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn bounds(&self) -> Option<&[(f64, f64)]> {
        self.bounds.as_deref()
    }

    pub fn contains_box(&self, x: &[f64]) -> bool {
        match &self.bounds {
            None => true,
            Some(b) => x.iter().zip(b).all(|(v, (lo, hi))| lo <= v && v <= hi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckConfig {
    pub samples: usize,
    /// Relative tolerance; the band is `tol·(1 + max|value|)`.
    pub tol: f64,
    pub seed: u64,
    /// Constant weight of case 3, at least 1.
    pub beta: f64,
    /// Origin limits use radii `2^{-k}·r_min` for `k = 0..=limit_steps`.
    pub limit_steps: u32,
    pub limit_directions: usize,
    /// Share of samples placed on the coordinate hyperplanes.
    pub plane_fraction: f64,
    pub exec: Exec,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            samples: 2000,
            tol: 1e-9,
            seed: 42,
            beta: 1.0,
            limit_steps: 20,
            limit_directions: 64,
            plane_fraction: 0.1,
            exec: Exec::default(),
        }
    }
}

impl CheckConfig {
    pub fn validate(&self) -> Result<(), CheckError> {
        let bad = |m: &str| Err(CheckError::InvalidConfig(m.to_string()));
        if self.samples == 0 {
            return bad("sample count must be at least 1");
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return bad("tolerance must be finite and non-negative");
        }
        if !(self.beta >= 1.0 && self.beta.is_finite()) {
            return bad("beta must be a finite constant >= 1");
        }
        if self.limit_directions == 0 {
            return bad("limit checks need at least one direction");
        }
        if !(0.0..1.0).contains(&self.plane_fraction) {
            return bad("plane fraction must lie in [0, 1)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    HoldsOnSamples,
    Violated,
    Indefinite,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::HoldsOnSamples => "HOLDS_ON_SAMPLES",
            Status::Violated => "VIOLATED",
            Status::Indefinite => "INDEFINITE",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A sample whose value has the wrong sign for `condition`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub point: Vec<f64>,
    pub value: f64,
    pub condition: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margins {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// Per-sample sign tally relative to the tolerance band.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SignCounts {
    pub satisfied: usize,
    pub boundary: usize,
    pub violated: usize,
}

/// Outcome of an auxiliary sign requirement such as `div f ≤ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SideCheck {
    pub condition: String,
    pub counts: SignCounts,
    pub band: f64,
    pub worst: Option<Witness>,
}

impl SideCheck {
    pub fn holds(&self) -> bool {
        self.counts.violated == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    /// Short identifier such as `sufficient-case1`.
    pub check: String,
    /// The sign condition on the primary expression.
    pub condition: String,
    pub status: Status,
    /// For `HoldsOnSamples`: no primary value fell inside the band.
    pub strict: bool,
    pub witness: Option<Witness>,
    pub margins: Option<Margins>,
    pub band: f64,
    pub samples: usize,
    pub counts: SignCounts,
    pub sides: Vec<SideCheck>,
    /// One-based `j` such that every sample on the hyperplane `x_j = 0` is a
    /// boundary sample.
    pub equality_locus: Vec<usize>,
    pub limits: Vec<LimitCheck>,
    pub integrability: Option<IntegrabilityEstimate>,
    pub domain_error: Option<EvalError>,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.status == Status::HoldsOnSamples
    }

    pub fn limits_hold(&self) -> bool {
        self.limits.iter().all(|l| l.is_zero)
    }

    /// Stability claim supported by a sufficient check, if any.
    pub fn claim(&self) -> Option<&'static str> {
        if !self.check.starts_with("sufficient") && !self.check.starts_with("closed-loop") {
            return None;
        }
        if !self.holds() || !self.limits_hold() {
            return None;
        }
        Some(if self.strict {
            "asymptotically stable"
        } else {
            "stable"
        })
    }
}
