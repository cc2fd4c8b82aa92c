//! Divergence-based stability analysis for dynamical systems.
//!
//! The crate checks sign conditions on `div{ρ f}` and `div{ρ⁻¹ f}` for
//! nonlinear vector fields over sampled annular regions, checks and searches
//! matrix-inequality certificates for linear systems `ẋ = Ax`, synthesizes
//! stabilizing state feedback, and integrates trajectories with RK4 to provide
//! empirical ground truth.
//!
//! Every nonlinear verdict is sampling based: `HoldsOnSamples` means no
//! counterexample was found among the evaluated points, never a proof.

pub mod cli;
pub mod density;
pub mod divcheck;
pub mod exec;
pub mod expr;
pub mod linalg;
pub mod lincheck;
pub mod sim;
pub mod synth;

pub use density::{DensityFunction, ScalarFunction};
pub use divcheck::{CheckConfig, Region, Status, Verdict};
pub use exec::Exec;
pub use expr::{Expr, VectorField};
pub use linalg::{Matrix, Spectrum};
pub use lincheck::{GroundTruth, LinearCondition, TriState};
