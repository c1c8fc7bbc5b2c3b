//! First-order wave systems with a drift term.
//!
//! [`EvoSystem`] assembles `∂₀M₀ + α∇_{X₀}M₀ + M₁ + [[0, −d̊*], [d̊, 0]]` on
//! `k`-forms × `(k+1)`-forms of a [`CylinderGrid`](crate::calculus::CylinderGrid)
//! and splits the drift into a bounded symmetric part and a skew part. The
//! [`cartesian`] submodule handles the constant-coefficient acoustic system on
//! a periodic box with its Fourier oracle; [`transform`] holds the change of
//! unknowns that absorbs the drift into `M₀`; [`pressure`] evaluates the
//! second-order pressure equation on computed solutions.

pub mod cartesian;
pub mod output;
pub mod pressure;
mod simulate;
mod stepper;
mod system;
pub mod transform;

pub use simulate::{simulate, SimulationOptions, SimulationResult, StepRecord, SupportProbe, WeightedBound};
pub use stepper::MidpointStepper;
pub use system::{DriftSpec, EvoSystem, ProductSpace};

use thiserror::Error;

use crate::calculus::CalculusError;
use crate::linalg::SolverError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveError {
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("degree {0} is outside 0..=2")]
    InvalidDegree(usize),
    #[error("M₀ and α do not commute (residual {0:.3e})")]
    CommutationViolated(f64),
    #[error("M₀ is not selfadjoint in the mass inner product (defect {0:.3e})")]
    NotSelfadjoint(f64),
    #[error("M₀ is not positive definite (smallest eigenvalue {0:.6e})")]
    NotPositive(f64),
    #[error("singular transform: |v₀| = 1 makes the drift-absorbing change of unknowns non-invertible")]
    SingularTransform,
    #[error("{0} requires a grid periodic in every direction")]
    NonPeriodic(&'static str),
    #[error("the second-order residual needs at least three time levels, got {0}")]
    InsufficientHistory(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("i/o error: {0}")]
    Io(String),
}
