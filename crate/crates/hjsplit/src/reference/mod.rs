//! Verification oracles, independent of the solver paths they check:
//! a monotone 2-D Lax-Friedrichs reference solver, brute-force Hopf-Lax
//! evaluation for constant speeds, brute-force proximal minimization, and
//! a dense KKT solve for quadratic instances.

pub mod brute_force;
pub mod dense;
pub mod kkt_oracle;
pub mod lax_friedrichs;
pub mod prox_oracle;

pub use brute_force::brute_force_lax;
pub use kkt_oracle::{kkt_linear_oracle, Quadratic1d};
pub use lax_friedrichs::{lax_friedrichs_2d, LfField, LfParams};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReferenceError {
    #[error("singular stationarity system")]
    SingularSystem,
    #[error("cfl factor must lie in (0, 1), got {0}")]
    CflRange(f64),
    #[error("domain interval is empty or mesh nonpositive")]
    BadDomain,
    #[error("requested times must be nonnegative and ascending")]
    BadTimes,
}
