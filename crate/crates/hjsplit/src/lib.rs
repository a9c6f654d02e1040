//! Grid-free computation of Hamilton-Jacobi equation solutions at arbitrary
//! space-time points, by PDHG-style splitting applied to time-discretized
//! Lax and Hopf saddle objectives.
//!
//! The library solves, at a single point `(x, t)`,
//!
//! ```text
//! phi_t + H(x, grad phi, t) = 0,   phi(., 0) = g,
//! ```
//!
//! for optimal-control Hamiltonians `H(x, p, s)` and two-player zero-sum
//! game Hamiltonians `H(x, y, p, -q, s)`, returning the value together with
//! the discrete characteristic curve (the converged primal/dual bundle).
//! Point solves are independent, so 2-D slices of high-dimensional domains
//! are swept in parallel ([`grid_eval`]).
//!
//! # Example
//!
//! ```
//! use hjsplit::config::PdhgConfig;
//! use hjsplit::pdhg_oc::solve_lax_oc;
//! use hjsplit::problems::eikonal::eikonal_plus;
//!
//! let problem = eikonal_plus(2);
//! let cfg = PdhgConfig::with_sigma(50.0, 0.02).unwrap().seed(7);
//! let report = solve_lax_oc(&problem, &[0.5, 0.5], 0.2, &cfg).unwrap();
//! assert!(report.converged);
//! // the discrete characteristic curve
//! let (x, p) = (&report.trajectory.x, &report.trajectory.p);
//! assert_eq!(x.n_slots(), 11);
//! assert_eq!(x.slot(10), &[0.5, 0.5]);
//! assert_eq!(p.slot(0), &[0.0, 0.0]);
//! ```
//!
//! Module map:
//! - [`config`], [`time_grid`], [`bundle`], [`problem`], [`report`]: domain
//!   types shared by the solvers.
//! - [`operators`]: shrink/stretch proximal maps, diagonal-quadratic
//!   conjugates, and the two time-difference operators with transposes.
//! - [`pdhg_oc`], [`pdhg_dg`]: the optimal-control and differential-games
//!   solvers (Lax and Hopf forms of each).
//! - [`problems`]: the built-in problem library and its registry.
//! - [`reference`](mod@reference): verification oracles (2-D
//!   Lax-Friedrichs, brute-force Hopf-Lax evaluation, dense KKT solves
//!   for quadratic instances).
//! - [`grid_eval`], [`contour`]: parallel slice sweeps, zero-level-set
//!   extraction, dimension-scaling harness, CSV schemas.

pub mod bundle;
pub mod config;
pub mod contour;
pub mod grid_eval;
pub mod operators;
pub mod pdhg_dg;
pub mod pdhg_oc;
pub mod problem;
pub mod problems;
pub mod reference;
pub mod report;
pub mod rng;
mod solver_core;
pub mod time_grid;

pub use bundle::{random_init, random_init_game, Bundle, TrajectoryBundle};
pub use config::{AnchorVariant, ConfigError, PdhgConfig, RestartPolicy, ValueStop};
pub use problem::{AnyProblem, ControlProblem, GameProblem, InitialData, ProxRule, SolverKind};
pub use report::{SolveError, SolveReport, StopReason};
pub use time_grid::{Scheme, TimeGrid};
