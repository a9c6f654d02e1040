//! Solver configuration: PDHG step sizes, stopping rules, restart policy.

use thiserror::Error;

/// Default product `sigma * tau`. The PDHG step-size condition is
/// `sigma * tau * ||D||^2 < 1`; we budget against the static bound
/// `||D|| < 2`, which mandates `sigma * tau < 0.25` strictly. Sitting a
/// fraction below the boundary keeps the product valid in floating point
/// for any `tau = DEFAULT_STEP_PRODUCT / sigma`.
pub const DEFAULT_STEP_PRODUCT: f64 = 0.24999;

/// Default iteration cap per solve (per restart attempt).
pub const DEFAULT_MAX_COUNT: usize = 50_000;

/// Default squared-update stopping tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Default infinity-norm radius of the random initialization.
pub const DEFAULT_INIT_RADIUS: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("sigma*tau = {product} violates sigma*tau*||D||^2 < 1 with the bound ||D|| < 2 (need sigma*tau < 0.25)")]
    StepProduct { product: f64 },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("theta must lie in [0, 1], got {value}")]
    ThetaRange { value: f64 },
    #[error("init_radius must be nonnegative, got {value}")]
    InitRadius { value: f64 },
    #[error("max_count must be at least 1")]
    ZeroMaxCount,
    #[error("t/delta = {ratio} is not within rounding tolerance of a positive integer (t = {t_final}, delta = {delta})")]
    NonDivisibleTime { t_final: f64, delta: f64, ratio: f64 },
}

/// Which iterate feeds the state-update anchor.
///
/// The two published forms of the splitting differ in one detail: the
/// anchor of the state update is taken either against the freshly updated
/// multipliers (classical PDHG ordering, [`AnchorVariant::MainText`], the
/// default) or against the multipliers from before this iteration's dual
/// update ([`AnchorVariant::Appendix`]). Both share the same fixed
/// points, but the decoupled `Appendix` ordering is not stable under the
/// usual step-size condition (it diverges even on quadratic saddles) and
/// exists only for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnchorVariant {
    Appendix,
    #[default]
    MainText,
}

/// What to do when the iteration cap is hit without convergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RestartPolicy {
    /// Take the capped result as-is (no restart).
    #[default]
    AcceptAtCap,
    /// Re-randomize from a derived seed and raise sigma by `sigma_bump`
    /// (tau is readjusted to keep the step-size product).
    BumpSigma,
    /// Re-randomize from a derived seed keeping sigma and tau.
    Reinit,
}

impl RestartPolicy {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "accept-at-cap" | "none" => Some(RestartPolicy::AcceptAtCap),
            "bump-sigma" => Some(RestartPolicy::BumpSigma),
            "reinit" => Some(RestartPolicy::Reinit),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RestartPolicy::AcceptAtCap => "accept-at-cap",
            RestartPolicy::BumpSigma => "bump-sigma",
            RestartPolicy::Reinit => "reinit",
        }
    }
}

/// Value-function stopping mode, complementing the squared-update tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ValueStop {
    /// Squared-update tests only.
    #[default]
    Off,
    /// At the iteration cap, accept if the relative value change stayed
    /// below `value_tol` over the last 10 iterations.
    FallbackAtCap,
    /// Stop as soon as the relative value change of consecutive iterations
    /// drops below `value_tol`.
    PerIteration,
}

/// PDHG solver configuration.
///
/// `sigma` (dual step), `tau` (primal step) and `theta` (extrapolation) are
/// the splitting parameters; `delta` is the time-discretization step. The
/// invariant `sigma*tau*4 < 1` is enforced by [`PdhgConfig::new`] and
/// re-checked by every solver entry point.
#[derive(Debug, Clone)]
pub struct PdhgConfig {
    pub sigma: f64,
    pub tau: f64,
    pub theta: f64,
    pub delta: f64,
    /// Squared-norm tolerance of the per-block update tests.
    pub tol: f64,
    pub max_count: usize,
    pub seed: u64,
    /// Infinity-norm radius of the random initialization around the target
    /// (states) and around the origin (costates).
    pub init_radius: f64,
    /// Additive sigma increase applied by [`RestartPolicy::BumpSigma`].
    pub sigma_bump: f64,
    /// Relative value-change tolerance used by [`ValueStop`].
    pub value_tol: Option<f64>,
    pub value_stop: ValueStop,
    pub restart_policy: RestartPolicy,
    pub max_restarts: u32,
    /// Count capped-out nodes as accepted in sweep summaries.
    pub accept_at_cap: bool,
    pub anchor: AnchorVariant,
    /// Record the per-iteration squared-update history in the report.
    pub record_history: bool,
}

impl PdhgConfig {
    /// Builds a configuration with explicit step sizes, validating the
    /// step-size product and positivity up front.
    pub fn new(sigma: f64, tau: f64, delta: f64) -> Result<Self, ConfigError> {
        let cfg = PdhgConfig {
            sigma,
            tau,
            theta: 1.0,
            delta,
            tol: DEFAULT_TOL,
            max_count: DEFAULT_MAX_COUNT,
            seed: 0,
            init_radius: DEFAULT_INIT_RADIUS,
            sigma_bump: 20.0,
            value_tol: None,
            value_stop: ValueStop::Off,
            restart_policy: RestartPolicy::AcceptAtCap,
            max_restarts: 3,
            accept_at_cap: false,
            anchor: AnchorVariant::default(),
            record_history: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Builds a configuration from `sigma` alone, with
    /// `tau = DEFAULT_STEP_PRODUCT / sigma`.
    pub fn with_sigma(sigma: f64, delta: f64) -> Result<Self, ConfigError> {
        Self::new(sigma, DEFAULT_STEP_PRODUCT / sigma, delta)
    }

    /// Replaces sigma, rescaling tau to keep the current step-size product.
    pub fn rescale_sigma(&mut self, sigma: f64) {
        let product = self.sigma * self.tau;
        self.sigma = sigma;
        self.tau = product / sigma;
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [
            ("sigma", self.sigma),
            ("tau", self.tau),
            ("delta", self.delta),
            ("tol", self.tol),
        ] {
            if !(value > 0.0) {
                return Err(ConfigError::NonPositive { name, value });
            }
        }
        let product = self.sigma * self.tau;
        if !(product * 4.0 < 1.0) {
            return Err(ConfigError::StepProduct { product });
        }
        if !(self.theta >= 0.0 && self.theta <= 1.0) {
            return Err(ConfigError::ThetaRange { value: self.theta });
        }
        if !(self.init_radius >= 0.0) {
            return Err(ConfigError::InitRadius {
                value: self.init_radius,
            });
        }
        if self.max_count == 0 {
            return Err(ConfigError::ZeroMaxCount);
        }
        Ok(())
    }
}

/// The stall-recovery step policy: raise sigma additively, readjust tau to
/// keep the step-size product.
pub fn adapt_sigma(sigma: f64, sigma_bump: f64, step_product: f64) -> (f64, f64) {
    let next = sigma + sigma_bump;
    (next, step_product / next)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_strictly_feasible_product() {
        let cfg = PdhgConfig::new(50.0, 0.24999 / 50.0, 0.02).unwrap();
        assert!(cfg.sigma * cfg.tau * 4.0 < 1.0);
    }

    #[test]
    fn rejects_product_at_quarter() {
        // sigma*tau = 0.25 exactly sits on the ||D|| = 2 boundary.
        let err = PdhgConfig::new(2.0, 0.125, 0.02).unwrap_err();
        assert!(matches!(err, ConfigError::StepProduct { .. }));
    }

    #[test]
    fn rejects_product_above_quarter() {
        assert!(PdhgConfig::new(10.0, 0.3, 0.02).is_err());
    }

    #[test]
    fn rejects_nonpositive_fields() {
        assert!(PdhgConfig::new(-1.0, 0.1, 0.02).is_err());
        assert!(PdhgConfig::new(1.0, 0.1, 0.0).is_err());
        let mut cfg = PdhgConfig::with_sigma(50.0, 0.02).unwrap();
        cfg.tol = 0.0;
        assert!(cfg.validate().is_err());
        cfg.tol = 1e-8;
        cfg.theta = 1.5;
        assert!(cfg.validate().is_err());
        cfg.theta = 1.0;
        cfg.init_radius = -0.5;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn with_sigma_is_feasible_for_registry_sigmas() {
        for sigma in [0.5, 2.0, 5.0, 10.0, 11.0, 20.0, 50.0, 100.0] {
            let cfg = PdhgConfig::with_sigma(sigma, 0.02).unwrap();
            assert!(cfg.sigma * cfg.tau * 4.0 < 1.0, "sigma = {sigma}");
        }
    }

    #[test]
    fn rescale_preserves_product() {
        let mut cfg = PdhgConfig::with_sigma(50.0, 0.02).unwrap();
        let product = cfg.sigma * cfg.tau;
        cfg.rescale_sigma(70.0);
        assert!((cfg.sigma * cfg.tau - product).abs() < 1e-15);
        assert!(cfg.validate().is_ok());
    }
}
