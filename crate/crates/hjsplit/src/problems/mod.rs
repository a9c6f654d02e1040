//! The built-in problem library and its name registry.
//!
//! Each constructor returns a fully wired problem: Hamiltonian, analytic
//! gradients, per-block update rules, and initial data. The registry maps
//! the CLI problem names to constructors with their default solver
//! configurations attached.

pub mod bump;
pub mod diff_norms;
pub mod eikonal;
pub mod isaacs;
pub mod quadcopter;
pub mod quadratic;

pub use bump::BumpSpeed;
pub use diff_norms::diff_norms;
pub use eikonal::{eikonal_g_weights, eikonal_minus, eikonal_plus, eikonal_plus_with, eikonal_time};
pub use isaacs::{isaacs, IsaacsVariant};
pub use quadcopter::{quadcopter, quadcopter_with};
pub use quadratic::quadratic_control;

use crate::config::{PdhgConfig, RestartPolicy, ValueStop, DEFAULT_STEP_PRODUCT};
use crate::problem::{AnyProblem, SolverKind};
use std::sync::Arc;

/// PDE-level description used by the 2-D Lax-Friedrichs reference:
/// `hamiltonian(x, grad_phi, s)` on the flattened 2-D state, the true
/// initial data, and the dissipation bounds `alpha >= max |dH/dp_i|`.
#[derive(Clone)]
pub struct LfSpec {
    pub hamiltonian: Arc<dyn Fn(&[f64], &[f64], f64) -> f64 + Send + Sync>,
    pub initial: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    pub alpha: [f64; 2],
}

/// How a registry entry fixes its dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimRule {
    Fixed(usize),
    /// Any dimension at or above the given minimum (taken from the query
    /// point).
    AtLeast(usize),
}

impl DimRule {
    pub fn accepts(&self, dim: usize) -> bool {
        match self {
            DimRule::Fixed(d) => dim == *d,
            DimRule::AtLeast(d) => dim >= *d,
        }
    }

    pub fn default_dim(&self) -> usize {
        match self {
            DimRule::Fixed(d) => *d,
            DimRule::AtLeast(d) => (*d).max(2),
        }
    }
}

type BuildFn = Arc<dyn Fn(usize) -> AnyProblem + Send + Sync>;
type ConfigFn = Arc<dyn Fn(&[f64], f64) -> PdhgConfig + Send + Sync>;
type SigmaRuleFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A named problem with its default configuration.
#[derive(Clone)]
pub struct RegistryEntry {
    pub name: &'static str,
    pub dim: DimRule,
    pub default_solver: SolverKind,
    pub build: BuildFn,
    /// Default configuration for a point solve at `(target, t)`.
    pub default_config: ConfigFn,
    /// Trajectory-length defaults, when they differ from point solves.
    pub traj_config: Option<ConfigFn>,
    /// Per-point sigma override applied inside slice sweeps.
    pub sigma_rule: Option<SigmaRuleFn>,
    /// 2-D Lax-Friedrichs reference data, for problems that reduce to two
    /// spatial dimensions.
    pub lf: Option<LfSpec>,
}

impl RegistryEntry {
    /// The problem built at the dimension implied by a query point.
    pub fn build_for_point(&self, point: &[f64]) -> Option<AnyProblem> {
        if self.dim.accepts(point.len()) {
            Some((self.build)(point.len()))
        } else {
            None
        }
    }
}

fn base_cfg(sigma: f64, delta: f64) -> PdhgConfig {
    PdhgConfig::with_sigma(sigma, delta).expect("registry defaults are feasible")
}

/// The sigma selection rule of the state-dependent Eikonal runs: a large
/// step where the speed field has visible slope, a small one on the flat
/// plateau.
fn eikonal_sigma_rule(bump: BumpSpeed) -> SigmaRuleFn {
    Arc::new(move |x: &[f64]| {
        let mut grad = vec![0.0; x.len()];
        bump.grad(x, &mut grad);
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm > 1e-3 {
            50.0
        } else {
            0.5
        }
    })
}

fn lf_for_eikonal(sign: f64, time_drift: Option<[f64; 2]>) -> LfSpec {
    let bump = BumpSpeed::benchmark(2);
    let g = eikonal::eikonal_g(2);
    LfSpec {
        hamiltonian: Arc::new(move |x, p, s| {
            let c = match time_drift {
                None => bump.value(x),
                Some(d) => bump.value(&[x[0] - s * d[0], x[1] - s * d[1]]),
            };
            sign * c * (p[0] * p[0] + p[1] * p[1]).sqrt()
        }),
        initial: Arc::new(move |x| g.value(x)),
        alpha: [6.0, 6.0],
    }
}

/// All registered problems.
pub fn registry() -> Vec<RegistryEntry> {
    let mut entries = Vec::new();

    entries.push(RegistryEntry {
        name: "eikonal+",
        dim: DimRule::AtLeast(1),
        default_solver: SolverKind::LaxOc,
        build: Arc::new(|d| AnyProblem::Control(eikonal_plus(d))),
        default_config: Arc::new(|target, _t| {
            let rule = eikonal_sigma_rule(BumpSpeed::benchmark(target.len()));
            base_cfg(rule(target), 0.02)
        }),
        traj_config: None,
        sigma_rule: Some(eikonal_sigma_rule(BumpSpeed::benchmark(2))),
        lf: Some(lf_for_eikonal(1.0, None)),
    });

    entries.push(RegistryEntry {
        name: "eikonal-",
        dim: DimRule::AtLeast(1),
        default_solver: SolverKind::LaxOc,
        build: Arc::new(|d| AnyProblem::Control(eikonal_minus(d))),
        default_config: Arc::new(|_target, _t| base_cfg(100.0, 0.02)),
        traj_config: None,
        sigma_rule: None,
        lf: Some(lf_for_eikonal(-1.0, None)),
    });

    entries.push(RegistryEntry {
        name: "eikonal-t",
        dim: DimRule::AtLeast(2),
        default_solver: SolverKind::LaxOc,
        build: Arc::new(|d| {
            let mut drift = vec![0.0; d];
            drift[0] = -1.0;
            drift[1] = 1.0;
            AnyProblem::Control(eikonal_time(d, drift))
        }),
        default_config: Arc::new(|target, _t| {
            let rule = eikonal_sigma_rule(BumpSpeed::benchmark(target.len()));
            base_cfg(rule(target), 0.02)
        }),
        traj_config: None,
        sigma_rule: Some(eikonal_sigma_rule(BumpSpeed::benchmark(2))),
        lf: Some(lf_for_eikonal(1.0, Some([-1.0, 1.0]))),
    });

    for (name, dx, dy) in [("diffnorms2", 1usize, 1usize), ("diffnorms7", 1, 6)] {
        let game = diff_norms(dx, dy);
        let lf = if dx + dy == 2 {
            let h = game.hamiltonian.clone();
            let g = eikonal::eikonal_g(2);
            Some(LfSpec {
                hamiltonian: Arc::new(move |x, p, s| h(&x[..1], &x[1..], &p[..1], &p[1..], s)),
                initial: Arc::new(move |x| g.value(x)),
                alpha: [6.0, 6.0],
            })
        } else {
            None
        };
        entries.push(RegistryEntry {
            name,
            dim: DimRule::Fixed(dx + dy),
            default_solver: SolverKind::LaxDg,
            build: Arc::new(move |_| AnyProblem::Game(diff_norms(dx, dy))),
            default_config: Arc::new(|_target, _t| {
                let mut cfg = base_cfg(50.0, 0.02);
                cfg.restart_policy = RestartPolicy::BumpSigma;
                cfg.sigma_bump = 20.0;
                cfg.max_restarts = 3;
                cfg.value_stop = ValueStop::FallbackAtCap;
                cfg.value_tol = Some(1e-6);
                cfg
            }),
            traj_config: None,
            sigma_rule: None,
            lf,
        });
    }

    for (name, variant, solver) in [
        ("isaacs", IsaacsVariant::Convex, SolverKind::LaxDg),
        ("isaacs-cc", IsaacsVariant::ConvexConcave, SolverKind::HopfDg),
    ] {
        let game = isaacs(variant);
        let h = game.hamiltonian.clone();
        let g = game.initial_data.g.clone();
        entries.push(RegistryEntry {
            name,
            dim: DimRule::Fixed(2),
            default_solver: solver,
            build: Arc::new(move |_| AnyProblem::Game(isaacs(variant))),
            default_config: Arc::new(move |_target, t| {
                let mut cfg = match variant {
                    IsaacsVariant::Convex => {
                        let mut c = base_cfg(20.0, 0.005);
                        c.value_stop = ValueStop::PerIteration;
                        c.value_tol = Some(1e-6);
                        c
                    }
                    IsaacsVariant::ConvexConcave => {
                        let sigma = if t <= 0.075 + 1e-12 { 2.0 } else { 10.0 };
                        base_cfg(sigma, 0.005)
                    }
                };
                cfg.restart_policy = RestartPolicy::Reinit;
                cfg.max_restarts = 2;
                cfg
            }),
            traj_config: None,
            sigma_rule: None,
            lf: Some(LfSpec {
                hamiltonian: Arc::new(move |x, p, s| h(&x[..1], &x[1..], &p[..1], &p[1..], s)),
                initial: Arc::new(move |x| g(&x[..1], &x[1..])),
                alpha: [4.5, 13.5],
            }),
        });
    }

    entries.push(RegistryEntry {
        name: "quadcopter",
        dim: DimRule::Fixed(12),
        default_solver: SolverKind::HopfOc,
        build: Arc::new(|_| AnyProblem::Control(quadcopter())),
        default_config: Arc::new(|_target, _t| base_cfg(5.0, 0.005)),
        traj_config: Some(Arc::new(|_target, _t| {
            let mut cfg = PdhgConfig::new(11.0, 0.24 / 11.0, 0.05).expect("feasible");
            cfg.max_count = 200_000;
            cfg
        })),
        sigma_rule: None,
        lf: None,
    });

    entries
}

/// Looks a problem up by registry name.
pub fn lookup(name: &str) -> Option<RegistryEntry> {
    registry().into_iter().find(|e| e.name == name)
}

/// Rescales sigma by a per-point rule, preserving the step-size product.
pub fn apply_sigma_rule(cfg: &PdhgConfig, rule: &SigmaRuleFn, point: &[f64]) -> PdhgConfig {
    let mut out = cfg.clone();
    out.rescale_sigma(rule(point));
    out
}

/// The step-size product used by all registry default configurations.
pub fn default_step_product() -> f64 {
    DEFAULT_STEP_PRODUCT
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_resolve() {
        for name in [
            "eikonal+",
            "eikonal-",
            "eikonal-t",
            "diffnorms2",
            "diffnorms7",
            "isaacs",
            "isaacs-cc",
            "quadcopter",
        ] {
            let entry = lookup(name).unwrap_or_else(|| panic!("missing {name}"));
            let dim = entry.dim.default_dim();
            let problem = (entry.build)(dim);
            assert_eq!(problem.dim(), dim, "{name}");
            let cfg = (entry.default_config)(&vec![0.0; dim], 0.1);
            assert!(cfg.validate().is_ok(), "{name}");
        }
        assert!(lookup("nope").is_none());
    }

    #[test]
    fn eikonal_sigma_rule_values() {
        let entry = lookup("eikonal+").unwrap();
        let rule = entry.sigma_rule.unwrap();
        // near the bump the speed has slope; far out in the flat tail it does not
        assert_eq!(rule(&[1.0, 0.5]), 50.0);
        assert_eq!(rule(&[40.0, 40.0]), 0.5);
    }

    #[test]
    fn quadcopter_traj_config_steps() {
        let entry = lookup("quadcopter").unwrap();
        let cfg = (entry.traj_config.unwrap())(&[0.0; 12], 6.0);
        assert_eq!(cfg.sigma, 11.0);
        assert!((cfg.sigma * cfg.tau - 0.24).abs() < 1e-12);
        assert_eq!(cfg.delta, 0.05);
    }
}
