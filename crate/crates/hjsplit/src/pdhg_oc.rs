//! Optimal-control solvers: the Lax (backward Euler) and Hopf splittings.
//!
//! Both solve a discrete saddle objective at a fixed space-time point by
//! alternating per-slot block updates with quadratic anchors and an
//! extrapolated primal iterate.
//!
//! Lax objective (state slots `0..=N`, multipliers `1..=N` plus the fixed
//! accounting slot `p_0 = 0`):
//!
//! ```text
//! max_p min_x  g(x_0) + sum_j <p_j, x_j - x_{j-1}> - delta sum_j H(x_j, p_j, s_j)
//! ```
//!
//! Hopf objective (slots `1..=N`, requires the conjugate of `g`):
//!
//! ```text
//! max_p min_x  -g*(p_1) + <p_N, x_target> + sum_{j<N} <p_j - p_{j+1}, x_j>
//!              - delta sum_j H(x_j, p_j, s_j)
//! ```
//!
//! The state anchors use the freshly updated multipliers (classical PDHG
//! ordering); [`AnchorVariant::Appendix`](crate::config::AnchorVariant)
//! switches them to the previous multipliers for comparison. Both
//! orderings share their fixed points, which satisfy the discrete
//! characteristic system measured by [`kkt_residual_oc`].

use crate::bundle::{random_init, Bundle, TrajectoryBundle};
use crate::config::{AnchorVariant, PdhgConfig};
use crate::operators::{apply_d_hopf_into, apply_dt_lax_into, OperatorError};
use crate::problem::{ControlProblem, ProxRule, UpdateCtx};
use crate::report::{SolveError, SolveReport};
use crate::solver_core::{drive, BlockUpdates, Engine};
use crate::time_grid::{Scheme, TimeGrid};

fn check_target(problem: &ControlProblem, target: &[f64]) -> Result<(), SolveError> {
    if target.len() != problem.dim {
        return Err(SolveError::DimensionMismatch {
            expected: problem.dim,
            got: target.len(),
        });
    }
    Ok(())
}

fn check_bundle_shape(
    bundle: &TrajectoryBundle,
    dim: usize,
    grid: &TimeGrid,
) -> Result<(), SolveError> {
    let ok = bundle.x.dim() == dim
        && bundle.x.first_slot() == grid.first_slot()
        && bundle.x.n_slots() == grid.n_slots()
        && bundle.p.same_shape(&bundle.x)
        && bundle.z.same_shape(&bundle.x);
    if ok {
        Ok(())
    } else {
        Err(SolveError::Operator(OperatorError::ShapeMismatch {
            expected_dim: dim,
            expected_first: grid.first_slot(),
            dim: bundle.x.dim(),
            first: bundle.x.first_slot(),
        }))
    }
}

struct LaxOcEngine<'a> {
    problem: &'a ControlProblem,
    grid: &'a TimeGrid,
    target: &'a [f64],
    cfg: &'a PdhgConfig,
    sigma: f64,
    tau: f64,
    x: Bundle,
    p: Bundle,
    z: Bundle,
    /// `D^T p^k` materialized ahead of the state loop, only for the
    /// decoupled appendix anchor ordering.
    appendix_dp: Option<Bundle>,
    anchor: Vec<f64>,
    grad: Vec<f64>,
    old: Vec<f64>,
}

impl<'a> LaxOcEngine<'a> {
    fn new(
        problem: &'a ControlProblem,
        grid: &'a TimeGrid,
        target: &'a [f64],
        cfg: &'a PdhgConfig,
        init: TrajectoryBundle,
    ) -> Self {
        let dim = problem.dim;
        let appendix_dp = match cfg.anchor {
            AnchorVariant::Appendix => Some(Bundle::zeros_like(&init.p)),
            AnchorVariant::MainText => None,
        };
        LaxOcEngine {
            problem,
            grid,
            target,
            cfg,
            sigma: cfg.sigma,
            tau: cfg.tau,
            x: init.x,
            p: init.p,
            z: init.z,
            appendix_dp,
            anchor: vec![0.0; dim],
            grad: vec![0.0; dim],
            old: vec![0.0; dim],
        }
    }

    fn into_trajectory(self) -> TrajectoryBundle {
        TrajectoryBundle {
            x: self.x,
            p: self.p,
            z: self.z,
            y: None,
            q: None,
            w: None,
        }
    }
}

impl Engine for LaxOcEngine<'_> {
    fn iterate(&mut self) -> BlockUpdates {
        let n = self.grid.n_steps();
        let dim = self.problem.dim;
        let delta = self.grid.delta();
        let sd = self.sigma * delta;
        let td = self.tau * delta;
        let theta = self.cfg.theta;

        if let Some(dp) = &mut self.appendix_dp {
            apply_dt_lax_into(&self.p, dp).expect("lax shapes fixed at construction");
        }

        // multiplier block, in place; anchors fold the difference
        // (D z)_j = z_j - z_{j-1} in directly
        let mut dp2 = 0.0;
        for j in 1..=n {
            let s_j = self.grid.node(j);
            for i in 0..dim {
                let dz = self.z.slot(j)[i] - self.z.slot(j - 1)[i];
                self.anchor[i] = self.p.slot(j)[i] + self.sigma * dz;
            }
            self.old.copy_from_slice(self.p.slot(j));
            match &self.problem.p_update {
                ProxRule::GradStep => {
                    (self.problem.grad_p)(self.x.slot(j), &self.old, s_j, &mut self.grad);
                    let out = self.p.slot_mut(j);
                    for i in 0..dim {
                        out[i] = self.anchor[i] - sd * self.grad[i];
                    }
                }
                ProxRule::Prox(f) => {
                    let ctx = UpdateCtx {
                        x: self.x.slot(j),
                        y: &[],
                        p: &self.old,
                        q: &[],
                        s: s_j,
                        step: sd,
                    };
                    f(&self.anchor, &ctx, self.p.slot_mut(j));
                }
            }
            for i in 0..dim {
                let d = self.p.slot(j)[i] - self.old[i];
                dp2 += d * d;
            }
        }

        // state block, in place, extrapolating z slot by slot; the
        // anchors use the fresh multipliers ((D^T p)_0 = -p_1 under the
        //p_0 = 0 convention), or the pre-pass in appendix ordering
        let mut dx2 = 0.0;
        for i in 0..dim {
            self.anchor[i] = match &self.appendix_dp {
                Some(dp) => self.x.slot(0)[i] - self.tau * dp.slot(0)[i],
                None => self.x.slot(0)[i] + self.tau * self.p.slot(1)[i],
            };
        }
        self.old.copy_from_slice(self.x.slot(0));
        match &self.problem.initial_data.prox_g {
            Some(prox) => prox(&self.anchor, self.tau, self.x.slot_mut(0)),
            None => {
                (self.problem.initial_data.grad_g)(&self.old, &mut self.grad);
                let out = self.x.slot_mut(0);
                for i in 0..dim {
                    out[i] = self.anchor[i] - self.tau * self.grad[i];
                }
            }
        }
        for i in 0..dim {
            let d = self.x.slot(0)[i] - self.old[i];
            dx2 += d * d;
            self.z.slot_mut(0)[i] = self.x.slot(0)[i] + theta * d;
        }
        for j in 1..n {
            let s_j = self.grid.node(j);
            for i in 0..dim {
                let dp = match &self.appendix_dp {
                    Some(dp) => dp.slot(j)[i],
                    None => self.p.slot(j)[i] - self.p.slot(j + 1)[i],
                };
                self.anchor[i] = self.x.slot(j)[i] - self.tau * dp;
            }
            self.old.copy_from_slice(self.x.slot(j));
            match &self.problem.x_update {
                ProxRule::GradStep => {
                    (self.problem.grad_x)(&self.old, self.p.slot(j), s_j, &mut self.grad);
                    let out = self.x.slot_mut(j);
                    for i in 0..dim {
                        out[i] = self.anchor[i] + td * self.grad[i];
                    }
                }
                ProxRule::Prox(f) => {
                    let ctx = UpdateCtx {
                        x: &self.old,
                        y: &[],
                        p: self.p.slot(j),
                        q: &[],
                        s: s_j,
                        step: td,
                    };
                    f(&self.anchor, &ctx, self.x.slot_mut(j));
                }
            }
            for i in 0..dim {
                let d = self.x.slot(j)[i] - self.old[i];
                dx2 += d * d;
                self.z.slot_mut(j)[i] = self.x.slot(j)[i] + theta * d;
            }
        }
        // x_N stays pinned at the target, so z_N = x_N never moves
        debug_assert_eq!(self.x.slot(n), self.target);
        debug_assert_eq!(self.z.slot(n), self.target);

        BlockUpdates::two(dx2, dp2)
    }

    fn fval(&self) -> f64 {
        fval_lax_parts(self.problem, &self.x, &self.p, self.grid)
    }

    fn reinit(&mut self, seed: u64) {
        let mut cfg = self.cfg.clone();
        cfg.seed = seed;
        let fresh = random_init(self.problem.dim, self.target, &cfg, self.grid);
        self.x = fresh.x;
        self.p = fresh.p;
        self.z = fresh.z;
    }

    fn set_steps(&mut self, sigma: f64, tau: f64) {
        self.sigma = sigma;
        self.tau = tau;
    }
}

/// Lax splitting at `(target, t)`. The report's trajectory is the
/// converged `(x, p)` bundle, i.e. the discrete characteristic curve.
pub fn solve_lax_oc(
    problem: &ControlProblem,
    target: &[f64],
    t: f64,
    cfg: &PdhgConfig,
) -> Result<SolveReport, SolveError> {
    cfg.validate()?;
    check_target(problem, target)?;
    let grid = TimeGrid::new(t, cfg.delta, Scheme::Lax)?;
    let init = random_init(problem.dim, target, cfg, &grid);
    run_lax_oc(problem, target, &grid, cfg, init)
}

/// Lax splitting warm-started from a given bundle (shape-checked; the
/// pinned slots are re-pinned).
pub fn solve_lax_oc_from(
    problem: &ControlProblem,
    target: &[f64],
    t: f64,
    cfg: &PdhgConfig,
    init: &TrajectoryBundle,
) -> Result<SolveReport, SolveError> {
    cfg.validate()?;
    check_target(problem, target)?;
    let grid = TimeGrid::new(t, cfg.delta, Scheme::Lax)?;
    check_bundle_shape(init, problem.dim, &grid)?;
    let mut init = init.clone();
    init.x.fill_slot(grid.n_steps(), target);
    init.p.slot_mut(0).fill(0.0);
    init.z.fill_slot(grid.n_steps(), target);
    run_lax_oc(problem, target, &grid, cfg, init)
}

fn run_lax_oc(
    problem: &ControlProblem,
    target: &[f64],
    grid: &TimeGrid,
    cfg: &PdhgConfig,
    init: TrajectoryBundle,
) -> Result<SolveReport, SolveError> {
    let mut engine = LaxOcEngine::new(problem, grid, target, cfg, init);
    let outcome = drive(&mut engine, cfg)?;
    let fval = engine.fval();
    Ok(SolveReport {
        fval,
        iterations: outcome.iterations,
        restarts: outcome.restarts,
        converged: outcome.converged,
        stop_reason: outcome.stop_reason,
        residual_history: outcome.history,
        trajectory: engine.into_trajectory(),
    })
}

struct HopfOcEngine<'a> {
    problem: &'a ControlProblem,
    grid: &'a TimeGrid,
    target: &'a [f64],
    cfg: &'a PdhgConfig,
    sigma: f64,
    tau: f64,
    x: Bundle,
    p: Bundle,
    z: Bundle,
    /// `D p^k` materialized ahead of the state loop, only for the
    /// decoupled appendix anchor ordering.
    appendix_dp: Option<Bundle>,
    anchor: Vec<f64>,
    grad: Vec<f64>,
    old: Vec<f64>,
}

impl<'a> HopfOcEngine<'a> {
    fn new(
        problem: &'a ControlProblem,
        grid: &'a TimeGrid,
        target: &'a [f64],
        cfg: &'a PdhgConfig,
        init: TrajectoryBundle,
    ) -> Self {
        let dim = problem.dim;
        let appendix_dp = match cfg.anchor {
            AnchorVariant::Appendix => Some(Bundle::zeros_like(&init.p)),
            AnchorVariant::MainText => None,
        };
        HopfOcEngine {
            problem,
            grid,
            target,
            cfg,
            sigma: cfg.sigma,
            tau: cfg.tau,
            x: init.x,
            p: init.p,
            z: init.z,
            appendix_dp,
            anchor: vec![0.0; dim],
            grad: vec![0.0; dim],
            old: vec![0.0; dim],
        }
    }

    fn into_trajectory(self) -> TrajectoryBundle {
        TrajectoryBundle {
            x: self.x,
            p: self.p,
            z: self.z,
            y: None,
            q: None,
            w: None,
        }
    }
}

impl Engine for HopfOcEngine<'_> {
    fn iterate(&mut self) -> BlockUpdates {
        let n = self.grid.n_steps();
        let dim = self.problem.dim;
        let delta = self.grid.delta();
        let sd = self.sigma * delta;
        let td = self.tau * delta;
        let theta = self.cfg.theta;
        let conj = self
            .problem
            .initial_data
            .conjugate
            .as_ref()
            .expect("checked at solve entry");

        if let Some(dp) = &mut self.appendix_dp {
            apply_d_hopf_into(&self.p, dp).expect("hopf shapes fixed at construction");
        }

        // multiplier block; (D^T z)_1 = z_1 and (D^T z)_j = z_j - z_{j-1}
        // for j >= 2; the first slot composes the prox of sigma g* after
        // its H step
        let mut dp2 = 0.0;
        for j in 1..=n {
            let s_j = self.grid.node(j);
            for i in 0..dim {
                let dtz = if j == 1 {
                    self.z.slot(1)[i]
                } else {
                    self.z.slot(j)[i] - self.z.slot(j - 1)[i]
                };
                self.anchor[i] = self.p.slot(j)[i] + self.sigma * dtz;
            }
            self.old.copy_from_slice(self.p.slot(j));
            match &self.problem.p_update {
                ProxRule::GradStep => {
                    (self.problem.grad_p)(self.x.slot(j), &self.old, s_j, &mut self.grad);
                    let out = self.p.slot_mut(j);
                    for i in 0..dim {
                        out[i] = self.anchor[i] - sd * self.grad[i];
                    }
                }
                ProxRule::Prox(f) => {
                    let ctx = UpdateCtx {
                        x: self.x.slot(j),
                        y: &[],
                        p: &self.old,
                        q: &[],
                        s: s_j,
                        step: sd,
                    };
                    f(&self.anchor, &ctx, self.p.slot_mut(j));
                }
            }
            if j == 1 {
                conj.prox_mut(self.p.slot_mut(1), self.sigma);
            }
            for i in 0..dim {
                let d = self.p.slot(j)[i] - self.old[i];
                dp2 += d * d;
            }
        }

        // interior state block; (D p)_j = p_j - p_{j+1} on these slots
        let mut dx2 = 0.0;
        for j in 1..n {
            let s_j = self.grid.node(j);
            for i in 0..dim {
                let dp = match &self.appendix_dp {
                    Some(dp) => dp.slot(j)[i],
                    None => self.p.slot(j)[i] - self.p.slot(j + 1)[i],
                };
                self.anchor[i] = self.x.slot(j)[i] - self.tau * dp;
            }
            self.old.copy_from_slice(self.x.slot(j));
            match &self.problem.x_update {
                ProxRule::GradStep => {
                    (self.problem.grad_x)(&self.old, self.p.slot(j), s_j, &mut self.grad);
                    let out = self.x.slot_mut(j);
                    for i in 0..dim {
                        out[i] = self.anchor[i] + td * self.grad[i];
                    }
                }
                ProxRule::Prox(f) => {
                    let ctx = UpdateCtx {
                        x: &self.old,
                        y: &[],
                        p: self.p.slot(j),
                        q: &[],
                        s: s_j,
                        step: td,
                    };
                    f(&self.anchor, &ctx, self.x.slot_mut(j));
                }
            }
            for i in 0..dim {
                let d = self.x.slot(j)[i] - self.old[i];
                dx2 += d * d;
                self.z.slot_mut(j)[i] = self.x.slot(j)[i] + theta * d;
            }
        }
        debug_assert_eq!(self.x.slot(n), self.target);
        debug_assert_eq!(self.z.slot(n), self.target);

        BlockUpdates::two(dx2, dp2)
    }

    fn fval(&self) -> f64 {
        fval_hopf_parts(self.problem, &self.x, &self.p, self.grid, self.target)
    }

    fn reinit(&mut self, seed: u64) {
        let mut cfg = self.cfg.clone();
        cfg.seed = seed;
        let fresh = random_init(self.problem.dim, self.target, &cfg, self.grid);
        self.x = fresh.x;
        self.p = fresh.p;
        self.z = fresh.z;
    }

    fn set_steps(&mut self, sigma: f64, tau: f64) {
        self.sigma = sigma;
        self.tau = tau;
    }
}

/// Hopf splitting at `(target, t)`; requires conjugate initial data.
pub fn solve_hopf_oc(
    problem: &ControlProblem,
    target: &[f64],
    t: f64,
    cfg: &PdhgConfig,
) -> Result<SolveReport, SolveError> {
    cfg.validate()?;
    check_target(problem, target)?;
    if problem.initial_data.conjugate.is_none() {
        return Err(SolveError::MissingConjugate);
    }
    let grid = TimeGrid::new(t, cfg.delta, Scheme::Hopf)?;
    let init = random_init(problem.dim, target, cfg, &grid);
    let mut engine = HopfOcEngine::new(problem, &grid, target, cfg, init);
    let outcome = drive(&mut engine, cfg)?;
    let fval = engine.fval();
    Ok(SolveReport {
        fval,
        iterations: outcome.iterations,
        restarts: outcome.restarts,
        converged: outcome.converged,
        stop_reason: outcome.stop_reason,
        residual_history: outcome.history,
        trajectory: engine.into_trajectory(),
    })
}

fn apply_sign(problem: &ControlProblem, raw: f64) -> f64 {
    if problem.negate_value {
        -raw
    } else {
        raw
    }
}

pub(crate) fn fval_lax_parts(
    problem: &ControlProblem,
    x: &Bundle,
    p: &Bundle,
    grid: &TimeGrid,
) -> f64 {
    let n = grid.n_steps();
    let delta = grid.delta();
    let mut value = (problem.initial_data.g)(x.slot(0));
    for j in 1..=n {
        let (xj, xjm, pj) = (x.slot(j), x.slot(j - 1), p.slot(j));
        let mut ip = 0.0;
        for i in 0..x.dim() {
            ip += pj[i] * (xj[i] - xjm[i]);
        }
        value += ip - delta * (problem.hamiltonian)(xj, pj, grid.node(j));
    }
    apply_sign(problem, value)
}

pub(crate) fn fval_hopf_parts(
    problem: &ControlProblem,
    x: &Bundle,
    p: &Bundle,
    grid: &TimeGrid,
    target: &[f64],
) -> f64 {
    let conj = problem
        .initial_data
        .conjugate
        .as_ref()
        .expect("hopf fval needs conjugate data");
    let n = grid.n_steps();
    let delta = grid.delta();
    let mut value = -conj.value(p.slot(1));
    let pn = p.slot(n);
    for i in 0..x.dim() {
        value += pn[i] * target[i];
    }
    for j in 1..n {
        let (pj, pj1, xj) = (p.slot(j), p.slot(j + 1), x.slot(j));
        for i in 0..x.dim() {
            value += (pj[i] - pj1[i]) * xj[i];
        }
    }
    for j in 1..=n {
        value -= delta * (problem.hamiltonian)(x.slot(j), p.slot(j), grid.node(j));
    }
    apply_sign(problem, value)
}

/// Backward-Euler Lax objective of a bundle (pure evaluation; applies the
/// problem's value sign).
pub fn fval_lax_oc(
    problem: &ControlProblem,
    bundle: &TrajectoryBundle,
    grid: &TimeGrid,
) -> Result<f64, SolveError> {
    check_bundle_shape(bundle, problem.dim, grid)?;
    Ok(fval_lax_parts(problem, &bundle.x, &bundle.p, grid))
}

/// Forward-Euler Lax objective: sums run over `j = 0..N-1` with `H`
/// evaluated at `(x_j, p_j, s_j)`, coupling `g` and `H` at `x_0`.
pub fn fval_lax_oc_forward(
    problem: &ControlProblem,
    bundle: &TrajectoryBundle,
    grid: &TimeGrid,
) -> Result<f64, SolveError> {
    check_bundle_shape(bundle, problem.dim, grid)?;
    let (x, p) = (&bundle.x, &bundle.p);
    let n = grid.n_steps();
    let delta = grid.delta();
    let mut value = (problem.initial_data.g)(x.slot(0));
    for j in 0..n {
        let (xj, xj1, pj) = (x.slot(j), x.slot(j + 1), p.slot(j));
        let mut ip = 0.0;
        for i in 0..x.dim() {
            ip += pj[i] * (xj1[i] - xj[i]);
        }
        value += ip - delta * (problem.hamiltonian)(xj, pj, grid.node(j));
    }
    Ok(apply_sign(problem, value))
}

/// Hopf objective of a bundle (pure evaluation).
pub fn fval_hopf_oc(
    problem: &ControlProblem,
    bundle: &TrajectoryBundle,
    grid: &TimeGrid,
    target: &[f64],
) -> Result<f64, SolveError> {
    check_bundle_shape(bundle, problem.dim, grid)?;
    check_target(problem, target)?;
    Ok(fval_hopf_parts(problem, &bundle.x, &bundle.p, grid, target))
}

/// Stationarity residuals of the discrete saddle at a bundle.
#[derive(Debug, Clone, Copy)]
pub struct KktResidualOc {
    /// `max_j ||x_j - x_{j-1} - delta grad_p H(x_j, p_j, s_j)||_inf`
    pub r_p: f64,
    /// `max_{0<j<N} ||p_j - p_{j+1} - delta grad_x H(x_j, p_j, s_j)||_inf`
    pub r_x: f64,
    /// `||grad g(x_0) - p_1||_inf`
    pub r_0: f64,
}

impl KktResidualOc {
    pub fn max(&self) -> f64 {
        self.r_p.max(self.r_x).max(self.r_0)
    }
}

/// Computes the saddle-stationarity residuals of a Lax- or Hopf-shaped
/// bundle. Hopf bundles carry no initial state; it is reconstructed as
/// `x_0 = grad g*(p_1)`, which makes `r_0` vanish identically there.
pub fn kkt_residual_oc(
    problem: &ControlProblem,
    bundle: &TrajectoryBundle,
    grid: &TimeGrid,
) -> Result<KktResidualOc, SolveError> {
    check_bundle_shape(bundle, problem.dim, grid)?;
    let dim = problem.dim;
    let n = grid.n_steps();
    let delta = grid.delta();
    let (x, p) = (&bundle.x, &bundle.p);

    let x0: Vec<f64> = match grid.scheme() {
        Scheme::Lax => x.slot(0).to_vec(),
        Scheme::Hopf => {
            let conj = problem
                .initial_data
                .conjugate
                .as_ref()
                .ok_or(SolveError::MissingConjugate)?;
            let mut out = vec![0.0; dim];
            conj.grad(p.slot(1), &mut out);
            out
        }
    };

    let mut grad = vec![0.0; dim];
    let mut r_p = 0.0f64;
    for j in 1..=n {
        (problem.grad_p)(x.slot(j), p.slot(j), grid.node(j), &mut grad);
        let xjm = if j == 1 { &x0[..] } else { x.slot(j - 1) };
        for i in 0..dim {
            let res = x.slot(j)[i] - xjm[i] - delta * grad[i];
            r_p = r_p.max(res.abs());
        }
    }
    let mut r_x = 0.0f64;
    for j in 1..n {
        (problem.grad_x)(x.slot(j), p.slot(j), grid.node(j), &mut grad);
        for i in 0..dim {
            let res = p.slot(j)[i] - p.slot(j + 1)[i] - delta * grad[i];
            r_x = r_x.max(res.abs());
        }
    }
    (problem.initial_data.grad_g)(&x0, &mut grad);
    let mut r_0 = 0.0f64;
    for i in 0..dim {
        r_0 = r_0.max((grad[i] - p.slot(1)[i]).abs());
    }
    Ok(KktResidualOc { r_p, r_x, r_0 })
}

/// Rows `(s_j, x_j, p_j)` of a trajectory for output. Hopf bundles gain a
/// reconstructed `t = 0` row with `x_0 = grad g*(p_1)` and the initial
/// costate `p_1`.
pub fn trajectory_points(
    problem: &ControlProblem,
    traj: &TrajectoryBundle,
    grid: &TimeGrid,
) -> Result<Vec<(f64, Vec<f64>, Vec<f64>)>, SolveError> {
    let mut rows = Vec::with_capacity(grid.n_steps() + 1);
    if grid.scheme() == Scheme::Hopf {
        let conj = problem
            .initial_data
            .conjugate
            .as_ref()
            .ok_or(SolveError::MissingConjugate)?;
        let mut x0 = vec![0.0; problem.dim];
        conj.grad(traj.p.slot(1), &mut x0);
        rows.push((0.0, x0, traj.p.slot(1).to_vec()));
    }
    for j in grid.first_slot()..=grid.n_steps() {
        rows.push((grid.node(j), traj.x.slot(j).to_vec(), traj.p.slot(j).to_vec()));
    }
    Ok(rows)
}
