//! Differential-games solvers: four-block Lax and Hopf splittings.
//!
//! The Lax saddle objective over states `(x, y)` and multipliers `(p, q)`
//! (slots `0..=N`, accounting slots `p_0 = q_0 = 0`):
//!
//! ```text
//! min_q max_p min_x max_y  g(x_0, y_0)
//!     + sum_j [ <p_j, x_j - x_{j-1}> - <q_j, y_j - y_{j-1}> ]
//!     - delta sum_j H(x_j, y_j, p_j, -q_j, s_j)
//! ```
//!
//! Update order per iteration: `p` (descends `delta H` plus anchor), `q`
//! (descends `-delta H` plus anchor), `x` (initial slot through `g`,
//! interior descends `-delta H`), `y` (initial slot through `-g`, interior
//! descends `+delta H`, i.e. ascends the saddle), then joint extrapolation
//! of `(x, y)`. Stopping requires all four block updates below `tol`.
//!
//! The Hopf form (slots `1..=N`) applies to separable convex-concave data
//! `g(x, y) = e(x) + h(y)` and carries `e*` and the concave conjugate
//! `h_*` in the first-slot multiplier updates and in the value.

use crate::bundle::{random_init_game, Bundle, TrajectoryBundle};
use crate::config::{AnchorVariant, PdhgConfig};
use crate::operators::{
    apply_d_hopf_into, apply_d_lax_into, apply_dt_hopf_into, apply_dt_lax_into, OperatorError,
};
use crate::problem::{GameProblem, ProxRule, UpdateCtx};
use crate::report::{SolveError, SolveReport};
use crate::solver_core::{drive, BlockUpdates, Engine};
use crate::time_grid::{Scheme, TimeGrid};

pub use crate::config::adapt_sigma;

fn check_targets(problem: &GameProblem, tx: &[f64], ty: &[f64]) -> Result<(), SolveError> {
    if tx.len() != problem.dim_x || ty.len() != problem.dim_y {
        return Err(SolveError::DimensionMismatch {
            expected: problem.dim_total(),
            got: tx.len() + ty.len(),
        });
    }
    Ok(())
}

fn game_bundle_shape(
    bundle: &TrajectoryBundle,
    problem: &GameProblem,
    grid: &TimeGrid,
) -> Result<(), SolveError> {
    let ok = bundle.x.dim() == problem.dim_x
        && bundle.x.first_slot() == grid.first_slot()
        && bundle.x.n_slots() == grid.n_slots()
        && bundle.p.same_shape(&bundle.x)
        && matches!(&bundle.y, Some(y) if y.dim() == problem.dim_y && y.n_slots() == grid.n_slots())
        && matches!(&bundle.q, Some(q) if q.dim() == problem.dim_y && q.n_slots() == grid.n_slots());
    if ok {
        Ok(())
    } else {
        Err(SolveError::Operator(OperatorError::ShapeMismatch {
            expected_dim: problem.dim_x,
            expected_first: grid.first_slot(),
            dim: bundle.x.dim(),
            first: bundle.x.first_slot(),
        }))
    }
}

struct DgState {
    x: Bundle,
    y: Bundle,
    p: Bundle,
    q: Bundle,
    z: Bundle,
    w: Bundle,
    x_next: Bundle,
    y_next: Bundle,
    p_next: Bundle,
    q_next: Bundle,
    dz: Bundle,
    dw: Bundle,
    dp: Bundle,
    dq: Bundle,
}

impl DgState {
    fn from_init(init: TrajectoryBundle) -> Self {
        let y = init.y.expect("game init");
        let q = init.q.expect("game init");
        let w = init.w.expect("game init");
        DgState {
            x_next: init.x.clone(),
            y_next: y.clone(),
            p_next: init.p.clone(),
            q_next: q.clone(),
            dz: Bundle::zeros_like(&init.x),
            dw: Bundle::zeros_like(&y),
            dp: Bundle::zeros_like(&init.p),
            dq: Bundle::zeros_like(&q),
            x: init.x,
            y,
            p: init.p,
            q,
            z: init.z,
            w,
        }
    }

    fn reload(&mut self, init: TrajectoryBundle) {
        *self = DgState::from_init(init);
    }
    fn into_trajectory(self) -> TrajectoryBundle {
        TrajectoryBundle {
            x: self.x,
            p: self.p,
            z: self.z,
            y: Some(self.y),
            q: Some(self.q),
            w: Some(self.w),
        }
    }
}

struct DgEngine<'a> {
    problem: &'a GameProblem,
    grid: &'a TimeGrid,
    target_x: &'a [f64],
    target_y: &'a [f64],
    cfg: &'a PdhgConfig,
    sigma: f64,
    tau: f64,
    st: DgState,
    anchor: Vec<f64>,
    grad: Vec<f64>,
    qneg: Vec<f64>,
}

impl<'a> DgEngine<'a> {
    fn new(
        problem: &'a GameProblem,
        grid: &'a TimeGrid,
        target_x: &'a [f64],
        target_y: &'a [f64],
        cfg: &'a PdhgConfig,
        init: TrajectoryBundle,
    ) -> Self {
        let dmax = problem.dim_x.max(problem.dim_y);
        DgEngine {
            problem,
            grid,
            target_x,
            target_y,
            cfg,
            sigma: cfg.sigma,
            tau: cfg.tau,
            st: DgState::from_init(init),
            anchor: vec![0.0; dmax],
            grad: vec![0.0; dmax],
            qneg: vec![0.0; dmax],
        }
    }

}

fn negate_into(qneg: &mut [f64], src: &Bundle, j: usize) {
    for (o, v) in qneg.iter_mut().zip(src.slot(j)) {
        *o = -v;
    }
}

/// One four-block iteration shared by the Lax and Hopf forms; the scheme
/// decides slot ranges, difference operators, and first-slot data terms.
impl DgEngine<'_> {
    fn iterate_scheme(&mut self) -> BlockUpdates {
        let scheme = self.grid.scheme();
        let n = self.grid.n_steps();
        let (dx, dy) = (self.problem.dim_x, self.problem.dim_y);
        let delta = self.grid.delta();
        let sd = self.sigma * delta;
        let td = self.tau * delta;
        let first = self.grid.first_slot();

        match scheme {
            Scheme::Lax => {
                apply_d_lax_into(&self.st.z, &mut self.st.dz).expect("shape");
                apply_d_lax_into(&self.st.w, &mut self.st.dw).expect("shape");
            }
            Scheme::Hopf => {
                apply_dt_hopf_into(&self.st.z, &mut self.st.dz).expect("shape");
                apply_dt_hopf_into(&self.st.w, &mut self.st.dw).expect("shape");
            }
        }

        // p block
        for j in 1..=n {
            let s_j = self.grid.node(j);
            for i in 0..dx {
                self.anchor[i] = self.st.p.slot(j)[i] + self.sigma * self.st.dz.slot(j)[i];
            }
            negate_into(&mut self.qneg[..dy], &self.st.q, j);
            match &self.problem.p_update {
                ProxRule::GradStep => {
                    (self.problem.grad_p)(
                        self.st.x.slot(j),
                        self.st.y.slot(j),
                        self.st.p.slot(j),
                        &self.qneg[..dy],
                        s_j,
                        &mut self.grad[..dx],
                    );
                    let out = self.st.p_next.slot_mut(j);
                    for i in 0..dx {
                        out[i] = self.anchor[i] - sd * self.grad[i];
                    }
                }
                ProxRule::Prox(f) => {
                    let ctx = UpdateCtx {
                        x: self.st.x.slot(j),
                        y: self.st.y.slot(j),
                        p: self.st.p.slot(j),
                        q: self.st.q.slot(j),
                        s: s_j,
                        step: sd,
                    };
                    f(&self.anchor[..dx], &ctx, self.st.p_next.slot_mut(j));
                }
            }
            if scheme == Scheme::Hopf && j == 1 {
                let conj = self
                    .problem
                    .initial_data
                    .e_conjugate
                    .as_ref()
                    .expect("checked at solve entry");
                conj.prox_mut(self.st.p_next.slot_mut(1), self.sigma);
            }
        }

        // q block (descends -delta H against its anchor)
        for j in 1..=n {
            let s_j = self.grid.node(j);
            for i in 0..dy {
                self.anchor[i] = self.st.q.slot(j)[i] + self.sigma * self.st.dw.slot(j)[i];
            }
            negate_into(&mut self.qneg[..dy], &self.st.q, j);
            match &self.problem.q_update {
                ProxRule::GradStep => {
                    (self.problem.grad_qneg)(
                        self.st.x.slot(j),
                        self.st.y.slot(j),
                        self.st.p_next.slot(j),
                        &self.qneg[..dy],
                        s_j,
                        &mut self.grad[..dy],
                    );
                    // d/dq [-delta H(.., -q, ..)] = +delta dH/dq_neg
                    let out = self.st.q_next.slot_mut(j);
                    for i in 0..dy {
                        out[i] = self.anchor[i] - sd * self.grad[i];
                    }
                }
                ProxRule::Prox(f) => {
                    let ctx = UpdateCtx {
                        x: self.st.x.slot(j),
                        y: self.st.y.slot(j),
                        p: self.st.p_next.slot(j),
                        q: self.st.q.slot(j),
                        s: s_j,
                        step: sd,
                    };
                    f(&self.anchor[..dy], &ctx, self.st.q_next.slot_mut(j));
                }
            }
            if scheme == Scheme::Hopf && j == 1 {
                let h = self
                    .problem
                    .initial_data
                    .h_concave
                    .as_ref()
                    .expect("checked at solve entry");
                h.prox_neg_conjugate_mut(self.st.q_next.slot_mut(1), self.sigma);
            }
        }

        let (p_src, q_src) = match self.cfg.anchor {
            AnchorVariant::Appendix => (&self.st.p, &self.st.q),
            AnchorVariant::MainText => (&self.st.p_next, &self.st.q_next),
        };
        match scheme {
            Scheme::Lax => {
                apply_dt_lax_into(p_src, &mut self.st.dp).expect("shape");
                apply_dt_lax_into(q_src, &mut self.st.dq).expect("shape");
            }
            Scheme::Hopf => {
                apply_d_hopf_into(p_src, &mut self.st.dp).expect("shape");
                apply_d_hopf_into(q_src, &mut self.st.dq).expect("shape");
            }
        }

        // x block
        if scheme == Scheme::Lax {
            for i in 0..dx {
                self.anchor[i] = self.st.x.slot(0)[i] - self.tau * self.st.dp.slot(0)[i];
            }
            match &self.problem.initial_data.prox_x {
                Some(prox) => prox(
                    &self.anchor[..dx],
                    self.st.y.slot(0),
                    self.tau,
                    self.st.x_next.slot_mut(0),
                ),
                None => {
                    (self.problem.initial_data.grad_x)(
                        self.st.x.slot(0),
                        self.st.y.slot(0),
                        &mut self.grad[..dx],
                    );
                    let out = self.st.x_next.slot_mut(0);
                    for i in 0..dx {
                        out[i] = self.anchor[i] - self.tau * self.grad[i];
                    }
                }
            }
        }
        for j in first.max(1)..n {
            let s_j = self.grid.node(j);
            for i in 0..dx {
                self.anchor[i] = self.st.x.slot(j)[i] - self.tau * self.st.dp.slot(j)[i];
            }
            negate_into(&mut self.qneg[..dy], &self.st.q_next, j);
            match &self.problem.x_update {
                ProxRule::GradStep => {
                    (self.problem.grad_x)(
                        self.st.x.slot(j),
                        self.st.y.slot(j),
                        self.st.p_next.slot(j),
                        &self.qneg[..dy],
                        s_j,
                        &mut self.grad[..dx],
                    );
                    let out = self.st.x_next.slot_mut(j);
                    for i in 0..dx {
                        out[i] = self.anchor[i] + td * self.grad[i];
                    }
                }
                ProxRule::Prox(f) => {
                    let ctx = UpdateCtx {
                        x: self.st.x.slot(j),
                        y: self.st.y.slot(j),
                        p: self.st.p_next.slot(j),
                        q: self.st.q_next.slot(j),
                        s: s_j,
                        step: td,
                    };
                    f(&self.anchor[..dx], &ctx, self.st.x_next.slot_mut(j));
                }
            }
        }

        // y block (the saddle ascends in y: interior objective +delta H)
        if scheme == Scheme::Lax {
            for i in 0..dy {
                self.anchor[i] = self.st.y.slot(0)[i] - self.tau * self.st.dq.slot(0)[i];
            }
            match &self.problem.initial_data.prox_y_neg {
                Some(prox) => prox(
                    &self.anchor[..dy],
                    self.st.x_next.slot(0),
                    self.tau,
                    self.st.y_next.slot_mut(0),
                ),
                None => {
                    (self.problem.initial_data.grad_y)(
                        self.st.x_next.slot(0),
                        self.st.y.slot(0),
                        &mut self.grad[..dy],
                    );
                    let out = self.st.y_next.slot_mut(0);
                    for i in 0..dy {
                        out[i] = self.anchor[i] + self.tau * self.grad[i];
                    }
                }
            }
        }
        for j in first.max(1)..n {
            let s_j = self.grid.node(j);
            for i in 0..dy {
                self.anchor[i] = self.st.y.slot(j)[i] - self.tau * self.st.dq.slot(j)[i];
            }
            negate_into(&mut self.qneg[..dy], &self.st.q_next, j);
            match &self.problem.y_update {
                ProxRule::GradStep => {
                    (self.problem.grad_y)(
                        self.st.x_next.slot(j),
                        self.st.y.slot(j),
                        self.st.p_next.slot(j),
                        &self.qneg[..dy],
                        s_j,
                        &mut self.grad[..dy],
                    );
                    let out = self.st.y_next.slot_mut(j);
                    for i in 0..dy {
                        out[i] = self.anchor[i] - td * self.grad[i];
                    }
                }
                ProxRule::Prox(f) => {
                    let ctx = UpdateCtx {
                        x: self.st.x_next.slot(j),
                        y: self.st.y.slot(j),
                        p: self.st.p_next.slot(j),
                        q: self.st.q_next.slot(j),
                        s: s_j,
                        step: td,
                    };
                    f(&self.anchor[..dy], &ctx, self.st.y_next.slot_mut(j));
                }
            }
        }

        debug_assert_eq!(self.st.x_next.slot(n), self.target_x);
        debug_assert_eq!(self.st.y_next.slot(n), self.target_y);

        let theta = self.cfg.theta;
        for j in first..=n {
            for i in 0..dx {
                let xn = self.st.x_next.slot(j)[i];
                self.st.z.slot_mut(j)[i] = xn + theta * (xn - self.st.x.slot(j)[i]);
            }
            for i in 0..dy {
                let yn = self.st.y_next.slot(j)[i];
                self.st.w.slot_mut(j)[i] = yn + theta * (yn - self.st.y.slot(j)[i]);
            }
        }

        let dx2 = self.st.x_next.sq_dist(&self.st.x);
        let dy2 = self.st.y_next.sq_dist(&self.st.y);
        let dp2 = self.st.p_next.sq_dist(&self.st.p);
        let dq2 = self.st.q_next.sq_dist(&self.st.q);
        std::mem::swap(&mut self.st.x, &mut self.st.x_next);
        std::mem::swap(&mut self.st.y, &mut self.st.y_next);
        std::mem::swap(&mut self.st.p, &mut self.st.p_next);
        std::mem::swap(&mut self.st.q, &mut self.st.q_next);
        BlockUpdates::four(dx2, dy2, dp2, dq2)
    }
}

impl Engine for DgEngine<'_> {
    fn iterate(&mut self) -> BlockUpdates {
        self.iterate_scheme()
    }

    fn fval(&self) -> f64 {
        match self.grid.scheme() {
            Scheme::Lax => fval_lax_parts(
                self.problem,
                &self.st.x,
                &self.st.y,
                &self.st.p,
                &self.st.q,
                self.grid,
            ),
            Scheme::Hopf => fval_hopf_parts(
                self.problem,
                &self.st.x,
                &self.st.y,
                &self.st.p,
                &self.st.q,
                self.grid,
                self.target_x,
                self.target_y,
            ),
        }
    }

    fn reinit(&mut self, seed: u64) {
        let mut cfg = self.cfg.clone();
        cfg.seed = seed;
        let fresh = random_init_game(
            self.problem.dim_x,
            self.problem.dim_y,
            self.target_x,
            self.target_y,
            &cfg,
            self.grid,
        );
        self.st.reload(fresh);
    }

    fn set_steps(&mut self, sigma: f64, tau: f64) {
        self.sigma = sigma;
        self.tau = tau;
    }
}

fn run_dg(
    problem: &GameProblem,
    target_x: &[f64],
    target_y: &[f64],
    grid: &TimeGrid,
    cfg: &PdhgConfig,
) -> Result<SolveReport, SolveError> {
    let init = random_init_game(problem.dim_x, problem.dim_y, target_x, target_y, cfg, grid);
    let mut engine = DgEngine::new(problem, grid, target_x, target_y, cfg, init);
    let outcome = drive(&mut engine, cfg)?;
    let fval = engine.fval();
    Ok(SolveReport {
        fval,
        iterations: outcome.iterations,
        restarts: outcome.restarts,
        converged: outcome.converged,
        stop_reason: outcome.stop_reason,
        residual_history: outcome.history,
        trajectory: engine.st.into_trajectory(),
    })
}

/// Lax splitting for a game at `((target_x, target_y), t)`.
pub fn solve_lax_dg(
    problem: &GameProblem,
    target_x: &[f64],
    target_y: &[f64],
    t: f64,
    cfg: &PdhgConfig,
) -> Result<SolveReport, SolveError> {
    cfg.validate()?;
    check_targets(problem, target_x, target_y)?;
    let grid = TimeGrid::new(t, cfg.delta, Scheme::Lax)?;
    run_dg(problem, target_x, target_y, &grid, cfg)
}

/// Hopf splitting for separable convex-concave data.
pub fn solve_hopf_dg(
    problem: &GameProblem,
    target_x: &[f64],
    target_y: &[f64],
    t: f64,
    cfg: &PdhgConfig,
) -> Result<SolveReport, SolveError> {
    cfg.validate()?;
    check_targets(problem, target_x, target_y)?;
    if problem.initial_data.e_conjugate.is_none() || problem.initial_data.h_concave.is_none() {
        return Err(SolveError::MissingConjugate);
    }
    let grid = TimeGrid::new(t, cfg.delta, Scheme::Hopf)?;
    run_dg(problem, target_x, target_y, &grid, cfg)
}

fn fval_lax_parts(
    problem: &GameProblem,
    x: &Bundle,
    y: &Bundle,
    p: &Bundle,
    q: &Bundle,
    grid: &TimeGrid,
) -> f64 {
    let n = grid.n_steps();
    let delta = grid.delta();
    let (dx, dy) = (problem.dim_x, problem.dim_y);
    let mut value = (problem.initial_data.g)(x.slot(0), y.slot(0));
    let mut qneg = vec![0.0; dy];
    for j in 1..=n {
        for i in 0..dx {
            value += p.slot(j)[i] * (x.slot(j)[i] - x.slot(j - 1)[i]);
        }
        for i in 0..dy {
            value -= q.slot(j)[i] * (y.slot(j)[i] - y.slot(j - 1)[i]);
            qneg[i] = -q.slot(j)[i];
        }
        value -= delta * (problem.hamiltonian)(x.slot(j), y.slot(j), p.slot(j), &qneg, grid.node(j));
    }
    value
}

#[allow(clippy::too_many_arguments)]
fn fval_hopf_parts(
    problem: &GameProblem,
    x: &Bundle,
    y: &Bundle,
    p: &Bundle,
    q: &Bundle,
    grid: &TimeGrid,
    target_x: &[f64],
    target_y: &[f64],
) -> f64 {
    let e_conj = problem
        .initial_data
        .e_conjugate
        .as_ref()
        .expect("hopf fval needs e*");
    let h_concave = problem
        .initial_data
        .h_concave
        .as_ref()
        .expect("hopf fval needs h*");
    let n = grid.n_steps();
    let delta = grid.delta();
    let (dx, dy) = (problem.dim_x, problem.dim_y);

    let mut qneg = vec![0.0; dy];
    for i in 0..dy {
        qneg[i] = -q.slot(1)[i];
    }
    let mut value = -e_conj.value(p.slot(1)) - h_concave.concave_conjugate_value(&qneg);
    for i in 0..dx {
        value += p.slot(n)[i] * target_x[i];
    }
    for i in 0..dy {
        value -= q.slot(n)[i] * target_y[i];
    }
    for j in 1..n {
        for i in 0..dx {
            value += (p.slot(j)[i] - p.slot(j + 1)[i]) * x.slot(j)[i];
        }
        for i in 0..dy {
            value -= (q.slot(j)[i] - q.slot(j + 1)[i]) * y.slot(j)[i];
        }
    }
    for j in 1..=n {
        for i in 0..dy {
            qneg[i] = -q.slot(j)[i];
        }
        value -= delta * (problem.hamiltonian)(x.slot(j), y.slot(j), p.slot(j), &qneg, grid.node(j));
    }
    value
}

/// Lax game objective of a bundle (pure evaluation).
pub fn fval_lax_dg(
    problem: &GameProblem,
    bundle: &TrajectoryBundle,
    grid: &TimeGrid,
) -> Result<f64, SolveError> {
    game_bundle_shape(bundle, problem, grid)?;
    Ok(fval_lax_parts(
        problem,
        &bundle.x,
        bundle.y.as_ref().unwrap(),
        &bundle.p,
        bundle.q.as_ref().unwrap(),
        grid,
    ))
}

/// Hopf game objective of a bundle (pure evaluation).
pub fn fval_hopf_dg(
    problem: &GameProblem,
    bundle: &TrajectoryBundle,
    grid: &TimeGrid,
    target_x: &[f64],
    target_y: &[f64],
) -> Result<f64, SolveError> {
    game_bundle_shape(bundle, problem, grid)?;
    check_targets(problem, target_x, target_y)?;
    Ok(fval_hopf_parts(
        problem,
        &bundle.x,
        bundle.y.as_ref().unwrap(),
        &bundle.p,
        bundle.q.as_ref().unwrap(),
        grid,
        target_x,
        target_y,
    ))
}
