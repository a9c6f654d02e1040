//! Parallel evaluation of point solves over 2-D slices of the domain,
//! the dimension-scaling harness, and the CSV schemas shared with the
//! command-line tools.
//!
//! Every grid node is an independent solve; the sweep is a pure map with
//! per-point seeds derived from the base seed and the node indices, so
//! results are identical for any thread count or schedule.

use crate::config::PdhgConfig;
use crate::contour::{Field2, Segment};
use crate::pdhg_dg::{solve_hopf_dg, solve_lax_dg};
use crate::pdhg_oc::{solve_hopf_oc, solve_lax_oc};
use crate::problem::{AnyProblem, ControlProblem, SolverKind};
use crate::reference::dense;
use crate::report::{SolveError, SolveReport, StopReason};
use crate::rng::derive_seed;
use rayon::prelude::*;
use std::time::Instant;

/// A 2-D slice of the `d`-dimensional domain: all coordinates pinned at
/// `base` except the two axes, which sweep closed ranges at spacing
/// `mesh`.
#[derive(Debug, Clone)]
pub struct SliceGrid {
    pub base: Vec<f64>,
    pub axis_a: usize,
    pub axis_b: usize,
    pub range_a: (f64, f64),
    pub range_b: (f64, f64),
    pub mesh: f64,
}

fn axis_nodes(lo: f64, hi: f64, mesh: f64) -> Vec<f64> {
    let n = ((hi - lo) / mesh + 1e-9).floor() as usize + 1;
    (0..n).map(|i| lo + i as f64 * mesh).collect()
}

impl SliceGrid {
    pub fn new(
        base: Vec<f64>,
        axis_a: usize,
        axis_b: usize,
        range_a: (f64, f64),
        range_b: (f64, f64),
        mesh: f64,
    ) -> Result<Self, SolveError> {
        if axis_a == axis_b {
            return Err(SolveError::InvalidSlice("slice axes must differ"));
        }
        if axis_a >= base.len() || axis_b >= base.len() {
            return Err(SolveError::InvalidSlice("slice axis outside problem dimension"));
        }
        if !(mesh > 0.0) {
            return Err(SolveError::InvalidSlice("mesh must be positive"));
        }
        if range_a.1 < range_a.0 || range_b.1 < range_b.0 {
            return Err(SolveError::InvalidSlice("range is empty"));
        }
        Ok(SliceGrid {
            base,
            axis_a,
            axis_b,
            range_a,
            range_b,
            mesh,
        })
    }

    /// The symmetric square slice `[lo, hi]^2` on the first two axes.
    pub fn square(dim: usize, lo: f64, hi: f64, mesh: f64) -> Result<Self, SolveError> {
        SliceGrid::new(vec![0.0; dim], 0, 1, (lo, hi), (lo, hi), mesh)
    }

    pub fn nodes_a(&self) -> Vec<f64> {
        axis_nodes(self.range_a.0, self.range_a.1, self.mesh)
    }

    pub fn nodes_b(&self) -> Vec<f64> {
        axis_nodes(self.range_b.0, self.range_b.1, self.mesh)
    }

    /// The full-dimensional point at node `(i, j)`.
    pub fn point(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pt = self.base.clone();
        pt[self.axis_a] = a;
        pt[self.axis_b] = b;
        pt
    }
}

/// One node of a sweep (`stop_reason` absent means the solve diverged).
#[derive(Debug, Clone)]
pub struct PointResult {
    pub a: f64,
    pub b: f64,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub stop_reason: Option<StopReason>,
}

impl PointResult {
    pub fn stop_name(&self) -> &'static str {
        self.stop_reason.map_or("diverged", |r| r.name())
    }
}

/// A value field at one time: node-major over `nodes_a`, then `nodes_b`.
#[derive(Debug, Clone)]
pub struct SliceField {
    pub time: f64,
    pub nodes_a: Vec<f64>,
    pub nodes_b: Vec<f64>,
    pub points: Vec<PointResult>,
    /// Mean wall-clock seconds per point solve (`NaN` for parsed fields).
    pub mean_point_seconds: f64,
}

impl SliceField {
    pub fn point(&self, i: usize, j: usize) -> &PointResult {
        &self.points[i * self.nodes_b.len() + j]
    }

    pub fn to_field2(&self) -> Field2 {
        Field2 {
            xs: self.nodes_a.clone(),
            ys: self.nodes_b.clone(),
            values: self.points.iter().map(|p| p.value).collect(),
        }
    }

    /// Fraction of nodes whose result is usable (`tol`/`value-tol` stops,
    /// plus capped nodes when `accept_at_cap`).
    pub fn accepted_fraction(&self, accept_at_cap: bool) -> f64 {
        let ok = self
            .points
            .iter()
            .filter(|p| match p.stop_reason {
                Some(StopReason::Tol) | Some(StopReason::ValueTol) => true,
                Some(StopReason::MaxCount) => accept_at_cap,
                None => false,
            })
            .count();
        ok as f64 / self.points.len() as f64
    }

    /// Nodes that diverged or capped out, as `(i, j)` indices.
    pub fn failed_nodes(&self) -> Vec<(usize, usize)> {
        let nb = self.nodes_b.len();
        self.points
            .iter()
            .enumerate()
            .filter(|(_, p)| !matches!(p.stop_reason, Some(StopReason::Tol) | Some(StopReason::ValueTol)))
            .map(|(k, _)| (k / nb, k % nb))
            .collect()
    }
}

/// The per-point seed of node `(i, j)` at time index `k`.
pub fn point_seed(base_seed: u64, i: usize, j: usize, time_index: usize) -> u64 {
    derive_seed(base_seed, &[i as u64, j as u64, time_index as u64])
}

/// Runs one point solve with the matching solver.
pub fn solve_point(
    problem: &AnyProblem,
    solver: SolverKind,
    point: &[f64],
    t: f64,
    cfg: &PdhgConfig,
) -> Result<SolveReport, SolveError> {
    match (problem, solver) {
        (AnyProblem::Control(p), SolverKind::LaxOc) => solve_lax_oc(p, point, t, cfg),
        (AnyProblem::Control(p), SolverKind::HopfOc) => solve_hopf_oc(p, point, t, cfg),
        (AnyProblem::Game(g), SolverKind::LaxDg) => {
            solve_lax_dg(g, &point[..g.dim_x], &point[g.dim_x..], t, cfg)
        }
        (AnyProblem::Game(g), SolverKind::HopfDg) => {
            solve_hopf_dg(g, &point[..g.dim_x], &point[g.dim_x..], t, cfg)
        }
        (AnyProblem::Control(_), _) => Err(SolveError::SolverMismatch {
            solver: solver.name(),
            problem: "control",
        }),
        (AnyProblem::Game(_), _) => Err(SolveError::SolverMismatch {
            solver: solver.name(),
            problem: "game",
        }),
    }
}

/// Sweeps the slice at every requested time, one independent solve per
/// node. Per-node divergences are recorded (value `NaN`) without aborting
/// the sweep; systematic errors (bad config, solver/problem mismatch)
/// abort. `sigma_rule` optionally rescales sigma per point, preserving
/// the step-size product.
pub fn eval_slice(
    problem: &AnyProblem,
    solver: SolverKind,
    slice: &SliceGrid,
    times: &[f64],
    cfg: &PdhgConfig,
    sigma_rule: Option<&(dyn Fn(&[f64]) -> f64 + Sync)>,
) -> Result<Vec<SliceField>, SolveError> {
    cfg.validate()?;
    if slice.base.len() != problem.dim() {
        return Err(SolveError::DimensionMismatch {
            expected: problem.dim(),
            got: slice.base.len(),
        });
    }
    // surface systematic mismatches before spawning the sweep
    if solver.is_game() != matches!(problem, AnyProblem::Game(_)) {
        return Err(SolveError::SolverMismatch {
            solver: solver.name(),
            problem: if solver.is_game() { "control" } else { "game" },
        });
    }

    let nodes_a = slice.nodes_a();
    let nodes_b = slice.nodes_b();
    let nb = nodes_b.len();
    let tasks: Vec<(usize, usize, usize)> = (0..times.len())
        .flat_map(|k| (0..nodes_a.len()).flat_map(move |i| (0..nb).map(move |j| (k, i, j))))
        .collect();

    let results: Result<Vec<(PointResult, f64)>, SolveError> = tasks
        .par_iter()
        .map(|&(k, i, j)| {
            let (a, b) = (nodes_a[i], nodes_b[j]);
            let point = slice.point(a, b);
            let mut cfg_pt = cfg.clone();
            cfg_pt.seed = point_seed(cfg.seed, i, j, k);
            if let Some(rule) = sigma_rule {
                cfg_pt.rescale_sigma(rule(&point));
            }
            let clock = Instant::now();
            let solved = solve_point(problem, solver, &point, times[k], &cfg_pt);
            let secs = clock.elapsed().as_secs_f64();
            match solved {
                Ok(report) => Ok((
                    PointResult {
                        a,
                        b,
                        value: report.fval,
                        iterations: report.iterations,
                        converged: report.converged,
                        stop_reason: Some(report.stop_reason),
                    },
                    secs,
                )),
                Err(SolveError::Diverged { iteration }) => Ok((
                    PointResult {
                        a,
                        b,
                        value: f64::NAN,
                        iterations: iteration,
                        converged: false,
                        stop_reason: None,
                    },
                    secs,
                )),
                Err(other) => Err(other),
            }
        })
        .collect();
    let results = results?;

    let per_time = nodes_a.len() * nb;
    Ok(times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let slab = &results[k * per_time..(k + 1) * per_time];
            SliceField {
                time: t,
                nodes_a: nodes_a.clone(),
                nodes_b: nodes_b.clone(),
                points: slab.iter().map(|(p, _)| p.clone()).collect(),
                mean_point_seconds: slab.iter().map(|(_, s)| s).sum::<f64>() / per_time as f64,
            }
        })
        .collect())
}

/// Least-squares polynomial fit; returns coefficients highest degree
/// first, or `None` when there are fewer samples than coefficients.
fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> Option<Vec<f64>> {
    let m = degree + 1;
    if xs.len() < m {
        return None;
    }
    let mut ata = vec![vec![0.0; m]; m];
    let mut atb = vec![0.0; m];
    for (&x, &y) in xs.iter().zip(ys) {
        let mut powers = vec![1.0; m];
        for k in 1..m {
            powers[k] = powers[k - 1] * x;
        }
        for r in 0..m {
            for c in 0..m {
                ata[r][c] += powers[r] * powers[c];
            }
            atb[r] += powers[r] * y;
        }
    }
    let sol = dense::solve(ata, atb)?;
    let mut coeffs: Vec<f64> = sol.into_iter().collect();
    coeffs.reverse();
    Some(coeffs)
}

fn r_squared(xs: &[f64], ys: &[f64], coeffs: &[f64]) -> f64 {
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let mut ss_tot = 0.0;
    let mut ss_res = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let mut pred = 0.0;
        for c in coeffs {
            pred = pred * x + c;
        }
        ss_tot += (y - mean) * (y - mean);
        ss_res += (y - pred) * (y - pred);
    }
    if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    }
}

/// Scaling study output: medians/means per dimension plus linear and
/// quadratic least-squares fits of the median times (`NaN` coefficients
/// when too few dimensions for a fit).
#[derive(Debug, Clone)]
pub struct ScalingResult {
    pub dims: Vec<usize>,
    pub median_seconds: Vec<f64>,
    pub mean_seconds: Vec<f64>,
    /// `(slope, intercept)`
    pub fit_linear: (f64, f64),
    /// `(quadratic, linear, constant)`
    pub fit_quad: (f64, f64, f64),
    pub r2_linear: f64,
}

/// Times one point solve per dimension (median of `repeats`, after one
/// untimed warm-up each) and fits the runtime against dimension. Repeats
/// are interleaved round-robin across the dimensions so that slow system
/// phases hit all of them alike instead of biasing one.
pub fn scaling_run(
    family: &dyn Fn(usize) -> ControlProblem,
    dims: &[usize],
    point_rule: &dyn Fn(usize) -> Vec<f64>,
    t: f64,
    cfg: &PdhgConfig,
    repeats: usize,
) -> Result<ScalingResult, SolveError> {
    cfg.validate()?;
    if dims.is_empty() || dims.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SolveError::InvalidSlice("dims must be ascending"));
    }
    let repeats = repeats.max(1);
    let problems: Vec<(ControlProblem, Vec<f64>)> = dims
        .iter()
        .map(|&dim| (family(dim), point_rule(dim)))
        .collect();
    let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity(repeats); dims.len()];
    for (di, (problem, point)) in problems.iter().enumerate() {
        let mut cfg_pt = cfg.clone();
        cfg_pt.seed = derive_seed(cfg.seed, &[di as u64, u64::MAX]);
        solve_lax_oc(problem, point, t, &cfg_pt)?; // warm-up, untimed
    }
    for r in 0..repeats {
        for (di, (problem, point)) in problems.iter().enumerate() {
            let mut cfg_pt = cfg.clone();
            cfg_pt.seed = derive_seed(cfg.seed, &[di as u64, r as u64]);
            let start = Instant::now();
            solve_lax_oc(problem, point, t, &cfg_pt)?;
            samples[di].push(start.elapsed().as_secs_f64());
        }
    }
    let mut medians = Vec::with_capacity(dims.len());
    let mut means = Vec::with_capacity(dims.len());
    for sample in &mut samples {
        sample.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = if repeats % 2 == 1 {
            sample[repeats / 2]
        } else {
            0.5 * (sample[repeats / 2 - 1] + sample[repeats / 2])
        };
        medians.push(median);
        means.push(sample.iter().sum::<f64>() / repeats as f64);
    }

    let xs: Vec<f64> = dims.iter().map(|&d| d as f64).collect();
    let lin = polyfit(&xs, &medians, 1);
    let quad = polyfit(&xs, &medians, 2);
    let (fit_linear, r2_linear) = match lin {
        Some(c) => (
            (c[0], c[1]),
            r_squared(&xs, &medians, &c),
        ),
        None => ((f64::NAN, f64::NAN), f64::NAN),
    };
    let fit_quad = match quad {
        Some(c) => (c[0], c[1], c[2]),
        None => (f64::NAN, f64::NAN, f64::NAN),
    };
    Ok(ScalingResult {
        dims: dims.to_vec(),
        median_seconds: medians,
        mean_seconds: means,
        fit_linear,
        fit_quad,
        r2_linear,
    })
}

/// Serializes a float with 17 significant digits (round-trip exact).
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Field CSV schema: `t,a,b,value,iterations,converged,stop_reason`.
pub fn write_field_csv(out: &mut String, fields: &[SliceField]) {
    out.push_str("t,a,b,value,iterations,converged,stop_reason\n");
    for f in fields {
        for p in &f.points {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                fmt_float(f.time),
                fmt_float(p.a),
                fmt_float(p.b),
                fmt_float(p.value),
                p.iterations,
                p.converged,
                p.stop_name()
            ));
        }
    }
}

/// Parses the field CSV back into per-time fields (values only; solver
/// metadata is preserved as written).
pub fn parse_field_csv(text: &str) -> Result<Vec<SliceField>, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty csv")?;
    if header.trim() != "t,a,b,value,iterations,converged,stop_reason" {
        return Err(format!("unexpected header: {header}"));
    }
    let mut fields: Vec<SliceField> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 7 {
            return Err(format!("line {}: expected 7 columns", lineno + 2));
        }
        let parse = |s: &str| -> Result<f64, String> {
            s.parse::<f64>().map_err(|e| format!("line {}: {e}", lineno + 2))
        };
        let t = parse(cols[0])?;
        let (a, b, value) = (parse(cols[1])?, parse(cols[2])?, parse(cols[3])?);
        let iterations = cols[4]
            .parse::<usize>()
            .map_err(|e| format!("line {}: {e}", lineno + 2))?;
        let converged = cols[5] == "true";
        let stop_reason = match cols[6] {
            "tol" => Some(StopReason::Tol),
            "value-tol" => Some(StopReason::ValueTol),
            "max-count" => Some(StopReason::MaxCount),
            _ => None,
        };
        if fields.last().map(|f| f.time) != Some(t) {
            fields.push(SliceField {
                time: t,
                nodes_a: Vec::new(),
                nodes_b: Vec::new(),
                points: Vec::new(),
                mean_point_seconds: f64::NAN,
            });
        }
        let field = fields.last_mut().unwrap();
        field.points.push(PointResult {
            a,
            b,
            value,
            iterations,
            converged,
            stop_reason,
        });
    }
    // reconstruct the tensor grid from the node-major ordering
    for f in &mut fields {
        let mut nodes_b: Vec<f64> = Vec::new();
        for p in &f.points {
            if nodes_b.first() == Some(&p.b) {
                break;
            }
            nodes_b.push(p.b);
        }
        if nodes_b.is_empty() || f.points.len() % nodes_b.len() != 0 {
            return Err("rows do not form a rectangular grid".into());
        }
        let nb = nodes_b.len();
        let nodes_a: Vec<f64> = f.points.iter().step_by(nb).map(|p| p.a).collect();
        f.nodes_a = nodes_a;
        f.nodes_b = nodes_b;
    }
    Ok(fields)
}

/// Contour CSV schema: `t,segment,ax,ay,bx,by`.
pub fn write_contour_csv(out: &mut String, per_time: &[(f64, Vec<Segment>)]) {
    out.push_str("t,segment,ax,ay,bx,by\n");
    for (t, segments) in per_time {
        for (k, s) in segments.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt_float(*t),
                k,
                fmt_float(s.a[0]),
                fmt_float(s.a[1]),
                fmt_float(s.b[0]),
                fmt_float(s.b[1])
            ));
        }
    }
}

/// Scaling CSV schema:
/// `dim,median_seconds,mean_seconds,fit_linear_a,fit_linear_b,fit_quad_a,fit_quad_b,r2_linear`.
pub fn write_scaling_csv(out: &mut String, result: &ScalingResult) {
    out.push_str("dim,median_seconds,mean_seconds,fit_linear_a,fit_linear_b,fit_quad_a,fit_quad_b,r2_linear\n");
    for (k, &dim) in result.dims.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            dim,
            fmt_float(result.median_seconds[k]),
            fmt_float(result.mean_seconds[k]),
            fmt_float(result.fit_linear.0),
            fmt_float(result.fit_linear.1),
            fmt_float(result.fit_quad.0),
            fmt_float(result.fit_quad.1),
            fmt_float(result.r2_linear)
        ));
    }
}

/// Trajectory CSV: `t,x1..xd,p1..pd`.
pub fn write_trajectory_csv(out: &mut String, rows: &[(f64, Vec<f64>, Vec<f64>)]) {
    if rows.is_empty() {
        return;
    }
    let d = rows[0].1.len();
    out.push_str("t");
    for i in 1..=d {
        out.push_str(&format!(",x{i}"));
    }
    for i in 1..=d {
        out.push_str(&format!(",p{i}"));
    }
    out.push('\n');
    for (t, x, p) in rows {
        out.push_str(&fmt_float(*t));
        for v in x.iter().chain(p) {
            out.push(',');
            out.push_str(&fmt_float(*v));
        }
        out.push('\n');
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::quadratic::quadratic_control;

    fn slice_1x1(at: [f64; 2]) -> SliceGrid {
        SliceGrid::new(vec![0.0, 0.0], 0, 1, (at[0], at[0]), (at[1], at[1]), 1.0).unwrap()
    }

    #[test]
    fn slice_node_counts() {
        let s = SliceGrid::square(2, -3.0, 3.0, 0.1).unwrap();
        assert_eq!(s.nodes_a().len(), 61);
        assert_eq!(s.nodes_b().len(), 61);
        let s2 = SliceGrid::square(2, -3.0, 3.0, 0.2).unwrap();
        assert_eq!(s2.nodes_a().len(), 31);
    }

    #[test]
    fn slice_validation() {
        assert!(SliceGrid::new(vec![0.0; 2], 0, 0, (0.0, 1.0), (0.0, 1.0), 0.1).is_err());
        assert!(SliceGrid::new(vec![0.0; 2], 0, 3, (0.0, 1.0), (0.0, 1.0), 0.1).is_err());
        assert!(SliceGrid::new(vec![0.0; 2], 0, 1, (0.0, 1.0), (0.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn degenerate_sweep_equals_direct_call() {
        let problem = AnyProblem::Control(quadratic_control(2, 1.0));
        let mut cfg = PdhgConfig::with_sigma(1.0, 0.02).unwrap();
        cfg.seed = 42;
        let slice = slice_1x1([0.6, -0.4]);
        let fields = eval_slice(&problem, SolverKind::LaxOc, &slice, &[0.1], &cfg, None).unwrap();
        assert_eq!(fields[0].points.len(), 1);

        let mut direct_cfg = cfg.clone();
        direct_cfg.seed = point_seed(cfg.seed, 0, 0, 0);
        let direct = match &problem {
            AnyProblem::Control(p) => solve_lax_oc(p, &[0.6, -0.4], 0.1, &direct_cfg).unwrap(),
            _ => unreachable!(),
        };
        assert_eq!(fields[0].points[0].value.to_bits(), direct.fval.to_bits());
    }

    #[test]
    fn thread_counts_do_not_change_results() {
        let problem = AnyProblem::Control(quadratic_control(2, 1.0));
        let cfg = PdhgConfig::with_sigma(1.0, 0.02).unwrap();
        let slice = SliceGrid::square(2, -1.0, 1.0, 0.5).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                eval_slice(&problem, SolverKind::LaxOc, &slice, &[0.1, 0.2], &cfg, None).unwrap()
            })
        };
        let one = run(1);
        let eight = run(8);
        for (f1, f8) in one.iter().zip(&eight) {
            for (p1, p8) in f1.points.iter().zip(&f8.points) {
                assert_eq!(p1.value.to_bits(), p8.value.to_bits());
                assert_eq!(p1.iterations, p8.iterations);
            }
        }
    }

    #[test]
    fn sweep_is_a_pure_map_per_node() {
        // a node's result depends only on its own indices, never on which
        // other tasks run: sweeping one time must equal the first slab of
        // sweeping two
        let problem = AnyProblem::Control(quadratic_control(2, 1.0));
        let cfg = PdhgConfig::with_sigma(1.0, 0.02).unwrap();
        let slice = SliceGrid::square(2, -1.0, 1.0, 0.5).unwrap();
        let single = eval_slice(&problem, SolverKind::LaxOc, &slice, &[0.1], &cfg, None).unwrap();
        let double =
            eval_slice(&problem, SolverKind::LaxOc, &slice, &[0.1, 0.2], &cfg, None).unwrap();
        for (a, b) in single[0].points.iter().zip(&double[0].points) {
            assert_eq!(a.value.to_bits(), b.value.to_bits());
        }
    }

    #[test]
    fn repeats_change_sampling_not_structure() {
        let cfg = PdhgConfig::with_sigma(1.0, 0.02).unwrap();
        let family = |d: usize| quadratic_control(d, 1.0);
        let rule = |d: usize| vec![0.2; d];
        let one = scaling_run(&family, &[2, 4], &rule, 0.1, &cfg, 1).unwrap();
        let five = scaling_run(&family, &[2, 4], &rule, 0.1, &cfg, 5).unwrap();
        for r in [&one, &five] {
            assert_eq!(r.median_seconds.len(), 2);
            assert!(r.median_seconds.iter().all(|s| s.is_finite() && *s > 0.0));
            assert!(r.fit_linear.0.is_finite());
        }
    }

    #[test]
    fn solver_mismatch_rejected() {
        let problem = AnyProblem::Control(quadratic_control(2, 1.0));
        let cfg = PdhgConfig::with_sigma(1.0, 0.02).unwrap();
        let slice = slice_1x1([0.0, 0.0]);
        assert!(matches!(
            eval_slice(&problem, SolverKind::LaxDg, &slice, &[0.1], &cfg, None),
            Err(SolveError::SolverMismatch { .. })
        ));
    }

    #[test]
    fn field_csv_round_trip() {
        let problem = AnyProblem::Control(quadratic_control(2, 1.0));
        let cfg = PdhgConfig::with_sigma(1.0, 0.02).unwrap();
        let slice = SliceGrid::square(2, -1.0, 1.0, 1.0).unwrap();
        let fields = eval_slice(&problem, SolverKind::LaxOc, &slice, &[0.1], &cfg, None).unwrap();
        let mut csv = String::new();
        write_field_csv(&mut csv, &fields);
        let parsed = parse_field_csv(&csv).unwrap();
        assert_eq!(parsed.len(), 1);
        assert_eq!(parsed[0].nodes_a, fields[0].nodes_a);
        assert_eq!(parsed[0].nodes_b, fields[0].nodes_b);
        for (a, b) in parsed[0].points.iter().zip(&fields[0].points) {
            assert_eq!(a.value.to_bits(), b.value.to_bits());
            assert_eq!(a.stop_reason, b.stop_reason);
        }
    }

    #[test]
    fn polyfit_recovers_linear_data() {
        let xs = [10.0, 50.0, 100.0, 200.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3e-4 * x + 0.002).collect();
        let c = polyfit(&xs, &ys, 1).unwrap();
        assert!((c[0] - 3e-4).abs() < 1e-12);
        assert!((c[1] - 0.002).abs() < 1e-12);
        assert!((r_squared(&xs, &ys, &c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scaling_run_single_dim_degenerates() {
        let cfg = PdhgConfig::with_sigma(1.0, 0.02).unwrap();
        let result = scaling_run(
            &|d| quadratic_control(d, 1.0),
            &[3],
            &|d| vec![0.2; d],
            0.1,
            &cfg,
            1,
        )
        .unwrap();
        assert!(result.fit_linear.0.is_nan());
        assert_eq!(result.median_seconds.len(), 1);
    }

    #[test]
    fn scaling_rejects_unsorted_dims() {
        let cfg = PdhgConfig::with_sigma(1.0, 0.02).unwrap();
        assert!(scaling_run(
            &|d| quadratic_control(d, 1.0),
            &[5, 3],
            &|d| vec![0.0; d],
            0.1,
            &cfg,
            1
        )
        .is_err());
    }
}
