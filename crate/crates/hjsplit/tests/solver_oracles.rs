//! Solver-level oracle checks: brute-force Lax values, exact-saddle fixed
//! points, the sign-flip reduction identity, restart determinism, and the
//! forward/backward objective averaging.

use hjsplit::bundle::random_init_game;
use hjsplit::config::{PdhgConfig, RestartPolicy};
use hjsplit::operators::{shrink2_mut, DiagQuadratic};
use hjsplit::pdhg_dg::solve_lax_dg;
use hjsplit::pdhg_oc::{
    fval_lax_oc, fval_lax_oc_forward, kkt_residual_oc, solve_hopf_oc, solve_lax_oc,
    solve_lax_oc_from,
};
use hjsplit::problem::{
    ControlProblem, GameInitialData, GameProblem, InitialData, ProxRule, UpdateCtx,
};
use hjsplit::problems::bump::BumpSpeed;
use hjsplit::problems::eikonal::{eikonal_g, eikonal_minus, eikonal_plus, eikonal_plus_with, eikonal_time};
use hjsplit::problems::quadcopter::quadcopter;
use hjsplit::problems::quadratic::quadratic_control;
use hjsplit::reference::{brute_force_lax, kkt_linear_oracle, Quadratic1d};
use hjsplit::report::StopReason;
use hjsplit::time_grid::{Scheme, TimeGrid};
use std::sync::Arc;

fn constant_speed_eikonal() -> ControlProblem {
    eikonal_plus_with(2, BumpSpeed::new(1.0, 0.0, 4.0, vec![0.0, 0.0], 1.0))
}

#[test]
fn constant_speed_values_match_brute_force() {
    // the two named instances plus a few more points
    let problem = constant_speed_eikonal();
    let g = eikonal_g(2);
    let mut cfg = PdhgConfig::with_sigma(0.5, 0.02).unwrap();
    cfg.seed = 4;
    for (target, t) in [
        ([0.0, 0.0], 0.2),
        ([3.0, 0.0], 0.2),
        ([2.0, -1.0], 0.1),
        ([-1.5, 0.5], 0.2),
    ] {
        let oracle = brute_force_lax(&|y| g.value(y), 1.0, &target, t);
        let report = solve_lax_oc(&problem, &target, t, &cfg).unwrap();
        assert!(report.converged);
        assert!(
            (report.fval - oracle).abs() <= 1e-4,
            "{target:?}: {} vs {oracle}",
            report.fval
        );
    }
    // the named instances in particular
    let v0 = brute_force_lax(&|y| g.value(y), 1.0, &[0.0, 0.0], 0.2);
    assert!((v0 - (-0.5)).abs() < 1e-9);
    let v3 = brute_force_lax(&|y| g.value(y), 1.0, &[3.0, 0.0], 0.2);
    assert!((v3 - 0.1272).abs() < 1e-8);
}

#[test]
fn short_time_limit_at_g_minimizer() {
    // one Lax step from the minimizer of g with radius-0 init
    let problem = eikonal_plus(2);
    let mut cfg = PdhgConfig::with_sigma(50.0, 0.02).unwrap();
    cfg.init_radius = 0.0;
    let report = solve_lax_oc(&problem, &[0.0, 0.0], 0.02, &cfg).unwrap();
    assert!((report.fval - (-0.5)).abs() < 1e-3, "fval {}", report.fval);
}

#[test]
fn exact_saddle_is_a_fixed_point() {
    // the dense-solve saddle moves less than 1e-9 under one iteration
    // with exact proxes
    let grid = TimeGrid::new(0.25, 0.05, Scheme::Lax).unwrap();
    let spec = Quadratic1d::new(0.8, DiagQuadratic::new(0.0, vec![1.0]));
    let (saddle, _) = kkt_linear_oracle(&spec, 1.3, &grid).unwrap();
    let problem = quadratic_control(1, 0.8);
    let res = kkt_residual_oc(&problem, &saddle, &grid).unwrap();
    assert!(res.max() < 1e-12, "oracle saddle not stationary: {res:?}");

    let mut cfg = PdhgConfig::new(0.49, 0.49, 0.05).unwrap();
    cfg.max_count = 1;
    let after = solve_lax_oc_from(&problem, &[1.3], 0.25, &cfg, &saddle).unwrap();
    let moved = after
        .trajectory
        .x
        .max_abs_diff(&saddle.x)
        .max(after.trajectory.p.max_abs_diff(&saddle.p));
    assert!(moved < 1e-9, "one iteration moved the saddle by {moved}");
}

#[test]
fn sign_flip_reduction_is_bit_exact() {
    // eikonal- must return exactly the negation of the positive solve on
    // -g with the same seed
    let minus = eikonal_minus(2);
    let mut positive_on_neg_g = minus.clone();
    positive_on_neg_g.negate_value = false;
    let mut cfg = PdhgConfig::with_sigma(100.0, 0.02).unwrap();
    cfg.seed = 21;
    for target in [[0.3, -0.8], [1.5, 1.0]] {
        let a = solve_lax_oc(&minus, &target, 0.2, &cfg).unwrap();
        let b = solve_lax_oc(&positive_on_neg_g, &target, 0.2, &cfg).unwrap();
        assert_eq!(a.fval.to_bits(), (-b.fval).to_bits());
        assert_eq!(a.trajectory, b.trajectory);
        assert_eq!(a.iterations, b.iterations);
    }
}

#[test]
fn eikonal_minus_initial_condition_at_short_time() {
    // phi^-(x, 0) = g(x): one-step short-time limit at the g minimizer
    let minus = eikonal_minus(2);
    let g = eikonal_g(2);
    let mut cfg = PdhgConfig::with_sigma(100.0, 0.005).unwrap();
    cfg.init_radius = 0.0;
    let report = solve_lax_oc(&minus, &[0.0, 0.0], 0.005, &cfg).unwrap();
    assert!((report.fval - g.value(&[0.0, 0.0])).abs() < 1e-3);
}

#[test]
fn quadcopter_hopf_point_solve_is_stationary() {
    let problem = quadcopter();
    let mut cfg = PdhgConfig::with_sigma(5.0, 0.005).unwrap();
    cfg.seed = 8;
    let report = solve_hopf_oc(&problem, &[0.0; 12], 0.025, &cfg).unwrap();
    assert!(report.converged);
    assert!(report.fval.is_finite());
    let grid = TimeGrid::new(0.025, 0.005, Scheme::Hopf).unwrap();
    let res = kkt_residual_oc(&problem, &report.trajectory, &grid).unwrap();
    assert!(res.r_p < 1e-3, "r_p {}", res.r_p);
    assert!(res.r_0 < 1e-12, "r_0 vanishes by construction, got {}", res.r_0);
}

#[test]
fn restart_determinism() {
    // force restarts and check bitwise reproducibility, including the
    // derived restart seeds
    let problem = eikonal_plus(2);
    let mut cfg = PdhgConfig::with_sigma(50.0, 0.02).unwrap();
    cfg.seed = 33;
    cfg.max_count = 40;
    cfg.restart_policy = RestartPolicy::BumpSigma;
    cfg.sigma_bump = 20.0;
    cfg.max_restarts = 2;
    let a = solve_lax_oc(&problem, &[0.7, 0.2], 0.2, &cfg).unwrap();
    let b = solve_lax_oc(&problem, &[0.7, 0.2], 0.2, &cfg).unwrap();
    assert!(a.restarts > 0, "test should exercise restarts");
    assert_eq!(a.fval.to_bits(), b.fval.to_bits());
    assert_eq!(a.iterations, b.iterations);
    assert_eq!(a.trajectory, b.trajectory);
}

#[test]
fn capped_solve_reports_max_count() {
    let problem = eikonal_plus(2);
    let mut cfg = PdhgConfig::with_sigma(50.0, 0.02).unwrap();
    cfg.max_count = 3;
    cfg.restart_policy = RestartPolicy::Reinit;
    cfg.max_restarts = 2;
    let report = solve_lax_oc(&problem, &[0.7, 0.2], 0.2, &cfg).unwrap();
    assert!(!report.converged);
    assert_eq!(report.stop_reason, StopReason::MaxCount);
    assert_eq!(report.restarts, 2);
    assert_eq!(report.iterations, 9);
}

#[test]
fn time_dependent_field_shears_the_solution() {
    // at t = 0.4 the moving-bump solution differs measurably from the
    // static one somewhere on a coarse grid
    let static_problem = eikonal_plus(2);
    let moving = eikonal_time(2, vec![-1.0, 1.0]);
    let mut cfg = PdhgConfig::with_sigma(50.0, 0.02).unwrap();
    cfg.seed = 2;
    let mut max_diff = 0.0f64;
    for i in 0..7 {
        for j in 0..7 {
            let target = [-3.0 + i as f64, -3.0 + j as f64];
            let a = solve_lax_oc(&static_problem, &target, 0.4, &cfg).unwrap();
            let b = solve_lax_oc(&moving, &target, 0.4, &cfg).unwrap();
            max_diff = max_diff.max((a.fval - b.fval).abs());
        }
    }
    assert!(max_diff > 0.01, "sheared solution too close: {max_diff}");
}

#[test]
fn forward_backward_averaging() {
    // Constant speed: the backward-Euler saddle value reproduces the
    // classical Lax value exactly, so the average can only match the
    // backward value and beat the forward one.
    let problem = constant_speed_eikonal();
    let g = eikonal_g(2);
    let delta = 0.02;
    let mut cfg = PdhgConfig::with_sigma(0.5, delta).unwrap();
    cfg.seed = 11;
    cfg.tol = 1e-12;
    let grid = TimeGrid::new(0.2, delta, Scheme::Lax).unwrap();
    for target in [[3.0, 0.0], [2.0, 1.5]] {
        let oracle = brute_force_lax(&|y| g.value(y), 1.0, &target, 0.2);
        let report = solve_lax_oc(&problem, &target, 0.2, &cfg).unwrap();
        let be = fval_lax_oc(&problem, &report.trajectory, &grid).unwrap();
        let fe = fval_lax_oc_forward(&problem, &report.trajectory, &grid).unwrap();
        let avg = 0.5 * (be + fe);
        assert!((be - oracle).abs() < 1e-8, "backward Euler is exact here");
        assert!((avg - oracle).abs() <= (fe - oracle).abs() + 1e-15);
    }

    // State-dependent speed: both objectives carry opposite O(delta)
    // errors and the average cancels them (reference: fine-step value).
    let bumpy = eikonal_plus(2);
    let target = [0.5, 0.5];
    let mut cfg_ref = PdhgConfig::with_sigma(50.0, 0.0025).unwrap();
    cfg_ref.seed = 11;
    cfg_ref.tol = 1e-13;
    cfg_ref.max_count = 200_000;
    let reference = solve_lax_oc(&bumpy, &target, 0.2, &cfg_ref).unwrap().fval;
    let mut cfg2 = PdhgConfig::with_sigma(50.0, 0.02).unwrap();
    cfg2.seed = 11;
    cfg2.tol = 1e-13;
    cfg2.max_count = 200_000;
    let report = solve_lax_oc(&bumpy, &target, 0.2, &cfg2).unwrap();
    let grid2 = TimeGrid::new(0.2, 0.02, Scheme::Lax).unwrap();
    let be = fval_lax_oc(&bumpy, &report.trajectory, &grid2).unwrap();
    let fe = fval_lax_oc_forward(&bumpy, &report.trajectory, &grid2).unwrap();
    let avg = 0.5 * (be + fe);
    assert!(
        (avg - reference).abs() < (be - reference).abs().min((fe - reference).abs()),
        "avg {:+.2e} be {:+.2e} fe {:+.2e}",
        avg - reference,
        be - reference,
        fe - reference
    );
}

/// Constant-speed symmetric game with antisymmetric quadratic data:
/// `H = c (||p|| - ||q||)`, `g(x, y) = (x^2 - y^2)/2`, for which the value
/// function obeys `phi(a, b, t) = -phi(b, a, t)`.
fn antisymmetric_game(c: f64) -> GameProblem {
    let gx = DiagQuadratic::new(0.0, vec![1.0]);
    let shrink = move |anchor: &[f64], ctx: &UpdateCtx, out: &mut [f64]| {
        out.copy_from_slice(anchor);
        shrink2_mut(out, ctx.step * c);
    };
    GameProblem {
        dim_x: 1,
        dim_y: 1,
        hamiltonian: Arc::new(move |_x, _y, p: &[f64], qn: &[f64], _s| {
            c * (p[0].abs() - qn[0].abs())
        }),
        grad_x: Arc::new(|_, _, _, _, _, out| out.fill(0.0)),
        grad_y: Arc::new(|_, _, _, _, _, out| out.fill(0.0)),
        grad_p: Arc::new(move |_, _, p: &[f64], _, _, out: &mut [f64]| {
            out[0] = c * p[0].signum();
        }),
        grad_qneg: Arc::new(move |_, _, _, qn: &[f64], _, out: &mut [f64]| {
            out[0] = -c * qn[0].signum();
        }),
        p_update: ProxRule::Prox(Arc::new(shrink)),
        q_update: ProxRule::Prox(Arc::new(shrink)),
        x_update: ProxRule::GradStep,
        y_update: ProxRule::GradStep,
        initial_data: GameInitialData {
            g: Arc::new(|x: &[f64], y: &[f64]| 0.5 * (x[0] * x[0] - y[0] * y[0])),
            grad_x: Arc::new(|x: &[f64], _y, out: &mut [f64]| out[0] = x[0]),
            grad_y: Arc::new(|_x, y: &[f64], out: &mut [f64]| out[0] = -y[0]),
            prox_x: Some({
                let g = gx.clone();
                Arc::new(move |a: &[f64], _o: &[f64], l: f64, out: &mut [f64]| {
                    out.copy_from_slice(a);
                    g.prox_mut(out, l);
                })
            }),
            prox_y_neg: Some({
                let g = gx;
                Arc::new(move |a: &[f64], _o: &[f64], l: f64, out: &mut [f64]| {
                    out.copy_from_slice(a);
                    g.prox_mut(out, l);
                })
            }),
            e_conjugate: None,
            h_concave: None,
        },
    }
}

#[test]
fn dual_swap_antisymmetry_of_symmetric_game() {
    let game = antisymmetric_game(2.0);
    let mut cfg = PdhgConfig::with_sigma(10.0, 0.02).unwrap();
    cfg.seed = 19;
    for (a, b) in [(0.8, -0.4), (1.5, 0.6), (-0.3, 1.1)] {
        let fab = solve_lax_dg(&game, &[a], &[b], 0.1, &cfg).unwrap();
        let fba = solve_lax_dg(&game, &[b], &[a], 0.1, &cfg).unwrap();
        assert!(fab.converged && fba.converged);
        assert!(
            (fab.fval + fba.fval).abs() < 1e-6,
            "phi({a},{b}) = {} vs phi({b},{a}) = {}",
            fab.fval,
            fba.fval
        );
    }
}

#[test]
fn diff_norms_point_value_matches_lf_reference() {
    let entry = hjsplit::problems::lookup("diffnorms2").unwrap();
    let game = match (entry.build)(2) {
        hjsplit::problem::AnyProblem::Game(g) => g,
        _ => unreachable!(),
    };
    let lf_spec = entry.lf.as_ref().unwrap();
    let params = hjsplit::reference::LfParams::new([(-3.0, 3.0), (-3.0, 3.0)], 0.025, lf_spec.alpha);
    let lf = hjsplit::reference::lax_friedrichs_2d(
        &*lf_spec.hamiltonian,
        &*lf_spec.initial,
        &params,
        &[0.1],
    )
    .unwrap();
    let cfg: PdhgConfig = (entry.default_config)(&[0.0, 0.0], 0.1).seed(51);
    for (a, b) in [(0.0, 0.0), (0.5, -0.5), (-1.0, 1.0)] {
        let report = solve_lax_dg(&game, &[a], &[b], 0.1, &cfg).unwrap();
        let reference = lf[0].interpolate(a, b);
        assert!(
            (report.fval - reference).abs() <= 0.05,
            "({a},{b}): {} vs {reference}",
            report.fval
        );
    }
}

#[test]
fn full_scale_eikonal_sweep_61x61() {
    // the production-resolution slice: [-3,3]^2 at mesh 0.1
    use hjsplit::grid_eval::{eval_slice, SliceGrid};
    use hjsplit::problem::{AnyProblem, SolverKind};
    let entry = hjsplit::problems::lookup("eikonal+").unwrap();
    let problem = (entry.build)(2);
    let cfg: PdhgConfig = (entry.default_config)(&[0.0, 0.0], 0.1).seed(61);
    let slice = SliceGrid::square(2, -3.0, 3.0, 0.1).unwrap();
    let rule = entry.sigma_rule.clone().unwrap();
    let fields = eval_slice(
        &problem,
        SolverKind::LaxOc,
        &slice,
        &[0.1],
        &cfg,
        Some(&|p: &[f64]| rule(p)),
    )
    .unwrap();
    let f = &fields[0];
    assert_eq!(f.nodes_a.len(), 61);
    assert_eq!(f.nodes_b.len(), 61);
    assert_eq!(f.points.len(), 61 * 61);
    assert!(f.accepted_fraction(false) > 0.999);
    assert!(f.mean_point_seconds.is_finite() && f.mean_point_seconds > 0.0);
    match &problem {
        AnyProblem::Control(p) => {
            // field matches a direct solve at a spot-check node
            let (i, j) = (30, 45);
            let mut cfg_pt = cfg.clone();
            cfg_pt.seed = hjsplit::grid_eval::point_seed(cfg.seed, i, j, 0);
            cfg_pt.rescale_sigma(rule(&slice.point(f.nodes_a[i], f.nodes_b[j])));
            let direct = solve_lax_oc(p, &slice.point(f.nodes_a[i], f.nodes_b[j]), 0.1, &cfg_pt)
                .unwrap();
            assert_eq!(f.point(i, j).value.to_bits(), direct.fval.to_bits());
        }
        _ => unreachable!(),
    }
}

#[test]
fn zero_bump_restart_equals_reinit() {
    // a bump of zero degenerates the bump-sigma policy into a pure
    // re-randomized restart
    let problem = eikonal_plus(2);
    let mut bump0 = PdhgConfig::with_sigma(50.0, 0.02).unwrap();
    bump0.seed = 6;
    bump0.max_count = 25;
    bump0.restart_policy = RestartPolicy::BumpSigma;
    bump0.sigma_bump = 0.0;
    bump0.max_restarts = 2;
    let mut reinit = bump0.clone();
    reinit.restart_policy = RestartPolicy::Reinit;
    let a = solve_lax_oc(&problem, &[0.7, 0.2], 0.2, &bump0).unwrap();
    let b = solve_lax_oc(&problem, &[0.7, 0.2], 0.2, &reinit).unwrap();
    assert_eq!(a.fval.to_bits(), b.fval.to_bits());
    assert_eq!(a.trajectory, b.trajectory);
}

#[test]
fn game_init_shapes() {
    // q_0 pinned at zero for Lax games, all four blocks drawn from one
    // seeded stream
    let grid = TimeGrid::new(0.1, 0.02, Scheme::Lax).unwrap();
    let mut cfg = PdhgConfig::with_sigma(50.0, 0.02).unwrap();
    cfg.seed = 3;
    let init = random_init_game(1, 6, &[0.5], &[0.0; 6], &cfg, &grid);
    assert_eq!(init.q.as_ref().unwrap().slot(0), &[0.0; 6]);
    assert_eq!(init.x.slot(5), &[0.5]);
    let again = random_init_game(1, 6, &[0.5], &[0.0; 6], &cfg, &grid);
    assert_eq!(init, again);
}

#[test]
fn gradient_checks_for_all_registered_problems() {
    use hjsplit::problem::{check_control_gradients, check_game_gradients, AnyProblem};
    for entry in hjsplit::problems::registry() {
        let problem = (entry.build)(entry.dim.default_dim());
        let worst = match &problem {
            AnyProblem::Control(p) => check_control_gradients(p, 100, 101),
            AnyProblem::Game(g) => check_game_gradients(g, 100, 101),
        };
        assert!(worst <= 1e-5, "{}: finite-difference error {worst}", entry.name);
    }
}
