//! Solve outcomes and errors.

use crate::bundle::TrajectoryBundle;
use crate::config::ConfigError;
use crate::operators::OperatorError;
use thiserror::Error;

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// All squared-update tests dropped below `tol`.
    Tol,
    /// The relative value-change criterion fired.
    ValueTol,
    /// The iteration cap was reached (after any restarts).
    MaxCount,
}

impl StopReason {
    pub fn name(&self) -> &'static str {
        match self {
            StopReason::Tol => "tol",
            StopReason::ValueTol => "value-tol",
            StopReason::MaxCount => "max-count",
        }
    }
}

/// Result of one point solve.
///
/// `converged` is true only when the squared-update tests held at the
/// final iterate (`stop_reason == Tol`); a `ValueTol` stop returns a
/// usable value without claiming iterate convergence. `residual_history`
/// holds the largest per-block squared update of each iteration when
/// history recording is enabled, and always retains the final one.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub fval: f64,
    pub iterations: usize,
    pub restarts: u32,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub residual_history: Vec<f64>,
    pub trajectory: TrajectoryBundle,
}

impl SolveReport {
    /// The last recorded squared-update residual.
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::NAN)
    }

    /// Whether downstream consumers should use the value: converged, or a
    /// value-tol stop, or a capped result when the config accepts those.
    pub fn accepted(&self, accept_at_cap: bool) -> bool {
        match self.stop_reason {
            StopReason::Tol | StopReason::ValueTol => true,
            StopReason::MaxCount => accept_at_cap,
        }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("iterates diverged (non-finite value) at iteration {iteration}")]
    Diverged { iteration: usize },
    #[error("target point has dimension {got}, problem expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("the Hopf solver needs conjugate initial data (g*, or the e*/h* pair for games)")]
    MissingConjugate,
    #[error("solver {solver} cannot run a {problem} problem")]
    SolverMismatch {
        solver: &'static str,
        problem: &'static str,
    },
    #[error("invalid slice: {0}")]
    InvalidSlice(&'static str),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}
