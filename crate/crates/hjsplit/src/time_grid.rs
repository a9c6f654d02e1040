//! Uniform time discretization of `[0, t]`.

use crate::config::ConfigError;

/// Bundle indexing convention of a discretized formula.
///
/// The Lax saddle objective carries the initial state, so its bundles hold
/// time slots `0..=N`; the Hopf objective eliminates the initial state
/// through the conjugate of `g` and its bundles hold slots `1..=N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Lax,
    Hopf,
}

/// Uniform grid `s_j = j * delta`, `j = 0..=N`, with `s_N = t_final`.
///
/// `N` is obtained by rounding `t_final / delta` to the nearest integer;
/// ratios not within rounding distance of a positive integer are rejected.
/// The stored `delta` is `t_final / N`, so the final node lands on
/// `t_final` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    t_final: f64,
    delta: f64,
    n_steps: usize,
    scheme: Scheme,
}

impl TimeGrid {
    pub fn new(t_final: f64, delta: f64, scheme: Scheme) -> Result<Self, ConfigError> {
        if !(t_final > 0.0) {
            return Err(ConfigError::NonPositive {
                name: "t_final",
                value: t_final,
            });
        }
        if !(delta > 0.0) {
            return Err(ConfigError::NonPositive {
                name: "delta",
                value: delta,
            });
        }
        let ratio = t_final / delta;
        let rounded = ratio.round();
        if !(rounded >= 1.0) || !((ratio - rounded).abs() < 0.5 - 1e-9) {
            return Err(ConfigError::NonDivisibleTime {
                t_final,
                delta,
                ratio,
            });
        }
        let n_steps = rounded as usize;
        Ok(TimeGrid {
            t_final,
            delta: t_final / rounded,
            n_steps,
            scheme,
        })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// The number of time steps `N`.
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// First bundle slot index: 0 for Lax, 1 for Hopf.
    pub fn first_slot(&self) -> usize {
        match self.scheme {
            Scheme::Lax => 0,
            Scheme::Hopf => 1,
        }
    }

    /// Number of bundle slots (`N + 1` for Lax, `N` for Hopf).
    pub fn n_slots(&self) -> usize {
        self.n_steps + 1 - self.first_slot()
    }

    /// Node time `s_j`.
    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.delta
    }

    /// All node times exposed by the scheme, in slot order.
    pub fn nodes(&self) -> Vec<f64> {
        (self.first_slot()..=self.n_steps)
            .map(|j| self.node(j))
            .collect()
    }
}
