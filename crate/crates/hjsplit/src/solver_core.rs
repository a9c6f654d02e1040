//! Shared iteration driver: stopping tests, value-function stopping, and
//! the restart policies. The four solvers plug in as [`Engine`]s.

use crate::config::{PdhgConfig, RestartPolicy, ValueStop};
use crate::report::{SolveError, StopReason};
use crate::rng::derive_seed;

/// Squared update norms of the blocks touched by one iteration.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BlockUpdates {
    vals: [f64; 4],
    n: usize,
}

impl BlockUpdates {
    pub fn two(a: f64, b: f64) -> Self {
        BlockUpdates {
            vals: [a, b, 0.0, 0.0],
            n: 2,
        }
    }

    pub fn four(a: f64, b: f64, c: f64, d: f64) -> Self {
        BlockUpdates {
            vals: [a, b, c, d],
            n: 4,
        }
    }

    pub fn max(&self) -> f64 {
        self.vals[..self.n].iter().copied().fold(0.0, f64::max)
    }

    pub fn all_below(&self, tol: f64) -> bool {
        self.vals[..self.n].iter().all(|v| *v < tol)
    }

    pub fn all_finite(&self) -> bool {
        self.vals[..self.n].iter().all(|v| v.is_finite())
    }
}

/// One solver iteration plus the hooks the driver needs.
pub(crate) trait Engine {
    fn iterate(&mut self) -> BlockUpdates;
    fn fval(&self) -> f64;
    /// Fresh random initialization for a restart attempt.
    fn reinit(&mut self, seed: u64);
    fn set_steps(&mut self, sigma: f64, tau: f64);
}

pub(crate) struct DriveOutcome {
    pub stop_reason: StopReason,
    pub converged: bool,
    pub iterations: usize,
    pub restarts: u32,
    pub history: Vec<f64>,
}

fn rel_value_change(f_new: f64, f_old: f64) -> f64 {
    (f_new - f_old).abs() / f_new.abs().min(1.0).max(f64::MIN_POSITIVE)
}

/// Runs attempts until convergence or the restart budget is exhausted.
///
/// An attempt ends when the per-block squared updates all drop below
/// `tol`, when the value-change criterion fires (per configuration), or at
/// `max_count` iterations. On a capped attempt the restart policy decides:
/// re-randomize from a seed derived off the base seed (optionally raising
/// sigma), or accept the capped state.
pub(crate) fn drive<E: Engine>(engine: &mut E, cfg: &PdhgConfig) -> Result<DriveOutcome, SolveError> {
    let value_tol = match cfg.value_stop {
        ValueStop::Off => None,
        _ => cfg.value_tol,
    };
    let mut history: Vec<f64> = Vec::new();
    let mut total = 0usize;
    let mut restarts = 0u32;
    let sigma_tau_product = cfg.sigma * cfg.tau;

    for attempt in 0.. {
        if attempt > 0 {
            match cfg.restart_policy {
                RestartPolicy::AcceptAtCap => break,
                RestartPolicy::BumpSigma | RestartPolicy::Reinit => {
                    if attempt > cfg.max_restarts {
                        break;
                    }
                    restarts += 1;
                    if matches!(cfg.restart_policy, RestartPolicy::BumpSigma) {
                        let sigma = cfg.sigma + attempt as f64 * cfg.sigma_bump;
                        engine.set_steps(sigma, sigma_tau_product / sigma);
                    }
                    engine.reinit(derive_seed(cfg.seed, &[attempt as u64]));
                }
            }
        }

        let mut prev_fval: Option<f64> = None;
        let mut tail_changes: Vec<f64> = Vec::new();
        let mut count = 0usize;
        loop {
            let updates = engine.iterate();
            count += 1;
            total += 1;
            if !updates.all_finite() {
                return Err(SolveError::Diverged { iteration: total });
            }
            let worst = updates.max();
            if cfg.record_history {
                history.push(worst);
            } else {
                history.clear();
                history.push(worst);
            }
            if updates.all_below(cfg.tol) {
                return Ok(DriveOutcome {
                    stop_reason: StopReason::Tol,
                    converged: true,
                    iterations: total,
                    restarts,
                    history,
                });
            }
            if let Some(vtol) = value_tol {
                let track_now = match cfg.value_stop {
                    ValueStop::PerIteration => true,
                    ValueStop::FallbackAtCap => count + 11 > cfg.max_count,
                    ValueStop::Off => false,
                };
                if track_now {
                    let f = engine.fval();
                    if let Some(prev) = prev_fval {
                        let change = rel_value_change(f, prev);
                        match cfg.value_stop {
                            ValueStop::PerIteration => {
                                if change < vtol {
                                    return Ok(DriveOutcome {
                                        stop_reason: StopReason::ValueTol,
                                        converged: false,
                                        iterations: total,
                                        restarts,
                                        history,
                                    });
                                }
                            }
                            ValueStop::FallbackAtCap => tail_changes.push(change),
                            ValueStop::Off => {}
                        }
                    }
                    prev_fval = Some(f);
                }
            }
            if count >= cfg.max_count {
                if matches!(cfg.value_stop, ValueStop::FallbackAtCap) {
                    if let Some(vtol) = value_tol {
                        if tail_changes.len() >= 10
                            && tail_changes.iter().rev().take(10).all(|c| *c < vtol)
                        {
                            return Ok(DriveOutcome {
                                stop_reason: StopReason::ValueTol,
                                converged: false,
                                iterations: total,
                                restarts,
                                history,
                            });
                        }
                    }
                }
                break;
            }
        }
    }

    Ok(DriveOutcome {
        stop_reason: StopReason::MaxCount,
        converged: false,
        iterations: total,
        restarts,
        history,
    })
}
