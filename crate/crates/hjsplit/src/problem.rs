//! Hamiltonian-centric problem descriptions.
//!
//! A problem bundles the Hamiltonian with its analytic gradients, the
//! per-block update recipes, and the initial data `g` (with conjugate
//! machinery where a solver needs it). Dynamics and running cost are not
//! represented separately: they are folded into `H`, which is what makes
//! the per-point optimization unconstrained.

use crate::operators::{ConcaveQuadratic, DiagQuadConjugate, DiagQuadratic};
use crate::rng::Xoshiro256;
use std::sync::Arc;

/// `H(x, p, s)`.
pub type HamiltonianFn = Arc<dyn Fn(&[f64], &[f64], f64) -> f64 + Send + Sync>;
/// Writes a gradient of `H(x, p, s)` into the output slice.
pub type GradientFn = Arc<dyn Fn(&[f64], &[f64], f64, &mut [f64]) + Send + Sync>;
/// `H(x, y, p, q_neg, s)`; the fourth argument is the negated multiplier
/// of the second player's dynamics, i.e. the PDE-gradient block.
pub type GameHamiltonianFn = Arc<dyn Fn(&[f64], &[f64], &[f64], &[f64], f64) -> f64 + Send + Sync>;
pub type GameGradientFn = Arc<dyn Fn(&[f64], &[f64], &[f64], &[f64], f64, &mut [f64]) + Send + Sync>;
pub type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type VecGradFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
pub type GameValueFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
pub type GameVecGradFn = Arc<dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync>;
/// Closed-form block update `(anchor, ctx) -> out`.
pub type ProxFn = Arc<dyn Fn(&[f64], &UpdateCtx, &mut [f64]) + Send + Sync>;
/// Initial-data prox `(anchor, lambda) -> out`.
pub type DataProxFn = Arc<dyn Fn(&[f64], f64, &mut [f64]) + Send + Sync>;
/// Initial-data prox in one game block, `(anchor, frozen_other_block,
/// lambda) -> out`.
pub type GameDataProxFn = Arc<dyn Fn(&[f64], &[f64], f64, &mut [f64]) + Send + Sync>;

/// Frozen slot values visible to a closed-form block update.
///
/// The block being updated sees its own previous iterate in its slot; the
/// other slots carry whichever iterate the update order prescribes. `q` is
/// the raw game multiplier (not negated); `y`/`q` are empty in
/// optimal-control solves. `step` is the prox parameter already scaled by
/// the time step (`sigma*delta` for dual blocks, `tau*delta` for state
/// blocks).
pub struct UpdateCtx<'a> {
    pub x: &'a [f64],
    pub y: &'a [f64],
    pub p: &'a [f64],
    pub q: &'a [f64],
    pub s: f64,
    pub step: f64,
}

/// How a solver performs one block update against its quadratic anchor:
/// a gradient step, a closed-form prox, or a prox-gradient mix. The mixed
/// updates are `Prox` closures that take the gradient step on their
/// smooth part before the prox (see the Isaacs multiplier update); the
/// Hopf solvers additionally compose the conjugate-data prox after
/// whichever rule the first multiplier slot uses.
#[derive(Clone)]
pub enum ProxRule {
    /// One explicit gradient step on the block objective, linearized at
    /// the previous iterate.
    GradStep,
    /// A closed-form proximal map (possibly prox-gradient internally).
    Prox(ProxFn),
}

impl std::fmt::Debug for ProxRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProxRule::GradStep => write!(f, "GradStep"),
            ProxRule::Prox(_) => write!(f, "Prox(..)"),
        }
    }
}

/// Initial data `g` with optional closed-form prox and conjugate triple.
#[derive(Clone)]
pub struct InitialData {
    pub g: ValueFn,
    pub grad_g: VecGradFn,
    pub prox_g: Option<DataProxFn>,
    pub conjugate: Option<DiagQuadConjugate>,
}

impl InitialData {
    /// Convex diagonal-quadratic data with closed-form prox and conjugate.
    pub fn from_diag_quadratic(dq: DiagQuadratic) -> Self {
        let conj = dq.conjugate();
        let g = dq.clone();
        let grad = dq.clone();
        let prox = dq;
        InitialData {
            g: Arc::new(move |x| g.value(x)),
            grad_g: Arc::new(move |x, out| grad.grad(x, out)),
            prox_g: Some(Arc::new(move |anchor, lambda, out| {
                out.copy_from_slice(anchor);
                prox.prox_mut(out, lambda);
            })),
            conjugate: Some(conj),
        }
    }

    /// The negated data `-g` of a convex diagonal quadratic; its prox is
    /// the stretch operator (callers must keep `lambda < min a_i`).
    pub fn from_negated_diag_quadratic(dq: DiagQuadratic) -> Self {
        let g = dq.clone();
        let grad = dq.clone();
        let stretch = dq;
        InitialData {
            g: Arc::new(move |x| -g.value(x)),
            grad_g: Arc::new(move |x, out| {
                grad.grad(x, out);
                for v in out.iter_mut() {
                    *v = -*v;
                }
            }),
            prox_g: Some(Arc::new(move |anchor, lambda, out| {
                out.copy_from_slice(anchor);
                stretch.stretch_mut(out, lambda);
            })),
            conjugate: None,
        }
    }
}

/// An optimal-control problem in Hamiltonian form.
#[derive(Clone)]
pub struct ControlProblem {
    pub dim: usize,
    pub hamiltonian: HamiltonianFn,
    pub grad_x: GradientFn,
    pub grad_p: GradientFn,
    pub p_update: ProxRule,
    pub x_update: ProxRule,
    pub initial_data: InitialData,
    /// Reported values are negated (the sign-flip reduction used for
    /// Hamiltonians with `H(x, -p, t) = H(x, p, t)`: solve with data `-g`,
    /// then negate).
    pub negate_value: bool,
}

/// Initial data `g(x, y)` of a game, with per-block proxes and the
/// separable convex-concave split used by the Hopf form.
#[derive(Clone)]
pub struct GameInitialData {
    pub g: GameValueFn,
    pub grad_x: GameVecGradFn,
    pub grad_y: GameVecGradFn,
    /// `argmin_x g(x, y) + ||x - v||^2 / (2 lambda)`, `(v, y, lambda) -> out`.
    pub prox_x: Option<GameDataProxFn>,
    /// `argmin_y -g(x, y) + ||y - v||^2 / (2 lambda)`, `(v, x, lambda) -> out`.
    pub prox_y_neg: Option<GameDataProxFn>,
    /// Convex conjugate of the separable convex part `e(x)`.
    pub e_conjugate: Option<DiagQuadConjugate>,
    /// The separable concave part `h(y)` (carries its concave conjugate).
    pub h_concave: Option<ConcaveQuadratic>,
}

/// A two-player zero-sum game problem in Hamiltonian form. The Hamiltonian
/// and its gradients take the negated second multiplier `q_neg = -q`.
#[derive(Clone)]
pub struct GameProblem {
    pub dim_x: usize,
    pub dim_y: usize,
    pub hamiltonian: GameHamiltonianFn,
    pub grad_x: GameGradientFn,
    pub grad_y: GameGradientFn,
    pub grad_p: GameGradientFn,
    /// Gradient in the `q_neg` argument.
    pub grad_qneg: GameGradientFn,
    pub p_update: ProxRule,
    pub q_update: ProxRule,
    pub x_update: ProxRule,
    pub y_update: ProxRule,
    pub initial_data: GameInitialData,
}

impl GameProblem {
    pub fn dim_total(&self) -> usize {
        self.dim_x + self.dim_y
    }
}

/// Either problem family, as stored in the registry.
#[derive(Clone)]
pub enum AnyProblem {
    Control(ControlProblem),
    Game(GameProblem),
}

impl AnyProblem {
    /// Dimension of the (stacked, for games) state.
    pub fn dim(&self) -> usize {
        match self {
            AnyProblem::Control(p) => p.dim,
            AnyProblem::Game(p) => p.dim_total(),
        }
    }
}

/// Which solver to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    LaxOc,
    HopfOc,
    LaxDg,
    HopfDg,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::LaxOc => "lax-oc",
            SolverKind::HopfOc => "hopf-oc",
            SolverKind::LaxDg => "lax-dg",
            SolverKind::HopfDg => "hopf-dg",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lax-oc" => Some(SolverKind::LaxOc),
            "hopf-oc" => Some(SolverKind::HopfOc),
            "lax-dg" => Some(SolverKind::LaxDg),
            "hopf-dg" => Some(SolverKind::HopfDg),
            _ => None,
        }
    }

    pub fn is_game(&self) -> bool {
        matches!(self, SolverKind::LaxDg | SolverKind::HopfDg)
    }
}

fn sample_block(rng: &mut Xoshiro256, dim: usize, floor: f64) -> Vec<f64> {
    (0..dim)
        .map(|_| {
            let v = rng.next_symmetric(2.0);
            // keep costate samples away from the nonsmooth sets of norm terms
            if v.abs() < floor {
                if v < 0.0 {
                    v - floor
                } else {
                    v + floor
                }
            } else {
                v
            }
        })
        .collect()
}

fn fd_check(
    eval: &dyn Fn(&[f64]) -> f64,
    at: &[f64],
    analytic: &[f64],
    h: f64,
) -> f64 {
    let scale = analytic.iter().fold(1.0f64, |m, g| m.max(g.abs()));
    let mut worst = 0.0f64;
    let mut pt = at.to_vec();
    for i in 0..at.len() {
        pt[i] = at[i] + h;
        let up = eval(&pt);
        pt[i] = at[i] - h;
        let dn = eval(&pt);
        pt[i] = at[i];
        let fd = (up - dn) / (2.0 * h);
        worst = worst.max((fd - analytic[i]).abs() / scale);
    }
    worst
}

/// Central finite-difference check of a control problem's gradients at
/// `n_points` seeded random points (step `1e-6`); returns the largest
/// relative error seen across both gradients and all points.
pub fn check_control_gradients(problem: &ControlProblem, n_points: usize, seed: u64) -> f64 {
    let mut rng = Xoshiro256::seed_from(seed);
    let h = 1e-6;
    let d = problem.dim;
    let mut worst = 0.0f64;
    let mut gx = vec![0.0; d];
    let mut gp = vec![0.0; d];
    for _ in 0..n_points {
        let x = sample_block(&mut rng, d, 0.0);
        let p = sample_block(&mut rng, d, 0.1);
        let s = rng.next_f64();
        (problem.grad_x)(&x, &p, s, &mut gx);
        (problem.grad_p)(&x, &p, s, &mut gp);
        let hamiltonian = &problem.hamiltonian;
        worst = worst.max(fd_check(&|xx| hamiltonian(xx, &p, s), &x, &gx, h));
        worst = worst.max(fd_check(&|pp| hamiltonian(&x, pp, s), &p, &gp, h));
    }
    worst
}

/// Finite-difference check of all four game gradients; same contract as
/// [`check_control_gradients`].
pub fn check_game_gradients(problem: &GameProblem, n_points: usize, seed: u64) -> f64 {
    let mut rng = Xoshiro256::seed_from(seed);
    let h = 1e-6;
    let (dx, dy) = (problem.dim_x, problem.dim_y);
    let mut worst = 0.0f64;
    let mut grad = vec![0.0; dx.max(dy)];
    for _ in 0..n_points {
        let x = sample_block(&mut rng, dx, 0.0);
        let y = sample_block(&mut rng, dy, 0.0);
        let p = sample_block(&mut rng, dx, 0.1);
        let qn = sample_block(&mut rng, dy, 0.1);
        let s = rng.next_f64();
        let ham = &problem.hamiltonian;

        (problem.grad_x)(&x, &y, &p, &qn, s, &mut grad[..dx]);
        worst = worst.max(fd_check(&|xx| ham(xx, &y, &p, &qn, s), &x, &grad[..dx], h));
        (problem.grad_y)(&x, &y, &p, &qn, s, &mut grad[..dy]);
        worst = worst.max(fd_check(&|yy| ham(&x, yy, &p, &qn, s), &y, &grad[..dy], h));
        (problem.grad_p)(&x, &y, &p, &qn, s, &mut grad[..dx]);
        worst = worst.max(fd_check(&|pp| ham(&x, &y, pp, &qn, s), &p, &grad[..dx], h));
        (problem.grad_qneg)(&x, &y, &p, &qn, s, &mut grad[..dy]);
        worst = worst.max(fd_check(&|qq| ham(&x, &y, &p, qq, s), &qn, &grad[..dy], h));
    }
    worst
}
