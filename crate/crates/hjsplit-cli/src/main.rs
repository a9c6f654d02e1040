//! `hjsplit` command-line interface: point solves, slice sweeps, contour
//! extraction, trajectories, the dimension-scaling study, and the
//! Lax-Friedrichs reference with field diffing.
//!
//! Exit codes: 0 success, 1 usage/configuration error, 2 non-convergence
//! under `--strict`.

mod cli_config;

use clap::{Parser, Subcommand};
use cli_config::{resolve_config, ConfigOverrides};
use hjsplit::config::PdhgConfig;
use hjsplit::contour::{extract_zero_level, hausdorff_distance, Field2};
use hjsplit::grid_eval::{
    eval_slice, fmt_float, parse_field_csv, scaling_run, solve_point, write_contour_csv,
    write_field_csv, write_scaling_csv, write_trajectory_csv, SliceField, SliceGrid,
};
use hjsplit::pdhg_oc::trajectory_points;
use hjsplit::problem::{AnyProblem, SolverKind};
use hjsplit::problems::{lookup, DimRule, RegistryEntry};
use hjsplit::reference::lax_friedrichs::{lax_friedrichs_2d, LfParams};
use hjsplit::time_grid::{Scheme, TimeGrid};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hjsplit",
    about = "Grid-free Hamilton-Jacobi solves via PDHG splitting of Lax/Hopf saddle objectives",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve at a single space-time point and print the value
    Solve {
        #[arg(long)]
        problem: String,
        /// Comma-separated point coordinates (stacked (x, y) for games)
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long)]
        time: f64,
        /// lax | hopf (defaults to the problem's registry solver)
        #[arg(long)]
        solver: Option<String>,
        /// Exit 2 when the solve does not converge
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        overrides: ConfigOverrides,
    },
    /// Sweep a 2-D slice and write the value field CSV
    Grid {
        #[arg(long)]
        problem: String,
        /// Comma-separated evaluation times
        #[arg(long, allow_hyphen_values = true)]
        times: String,
        #[arg(long)]
        out: String,
        #[arg(long, default_value_t = 0.1)]
        mesh: f64,
        /// Slice axes, e.g. "0,1"
        #[arg(long, default_value = "0,1")]
        axes: String,
        /// Base point (defaults to the origin)
        #[arg(long, allow_hyphen_values = true)]
        base: Option<String>,
        /// Axis-a range "lo,hi"
        #[arg(long, default_value = "-3,3", allow_hyphen_values = true)]
        range: String,
        /// Axis-b range (defaults to --range)
        #[arg(long, allow_hyphen_values = true)]
        range_b: Option<String>,
        #[arg(long)]
        solver: Option<String>,
        #[arg(long)]
        threads: Option<usize>,
        #[command(flatten)]
        overrides: ConfigOverrides,
    },
    /// Extract level-set segments from a field CSV
    Contour {
        #[arg(long, value_name = "FIELD_CSV")]
        r#in: String,
        #[arg(long)]
        out: String,
        #[arg(long, default_value_t = 0.0)]
        level: f64,
    },
    /// Compute one trajectory/characteristic curve and write it as CSV
    Traj {
        #[arg(long)]
        problem: String,
        /// Comma-separated terminal point
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        #[arg(long)]
        time: f64,
        #[arg(long)]
        out: String,
        #[arg(long)]
        solver: Option<String>,
        #[command(flatten)]
        overrides: ConfigOverrides,
    },
    /// Dimension-scaling study: median solve time per dimension plus fits
    Scale {
        #[arg(long)]
        problem: String,
        /// Comma-separated ascending dimensions
        #[arg(long)]
        dims: String,
        #[arg(long)]
        time: f64,
        #[arg(long)]
        out: String,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        /// First two coordinates of the query point (rest are zero)
        #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
        point: String,
        #[command(flatten)]
        overrides: ConfigOverrides,
    },
    /// Run the 2-D Lax-Friedrichs reference; optionally diff a PDHG field
    Lf {
        #[arg(long)]
        problem: String,
        #[arg(long, allow_hyphen_values = true)]
        times: String,
        #[arg(long)]
        out: String,
        #[arg(long, default_value_t = 0.05)]
        mesh: f64,
        #[arg(long, default_value = "-3,3", allow_hyphen_values = true)]
        range: String,
        #[arg(long, default_value_t = 0.4)]
        cfl: f64,
        /// Ghost cells per side
        #[arg(long, default_value_t = 10)]
        pad: usize,
        /// PDHG field CSV to compare against
        #[arg(long)]
        diff: Option<String>,
    },
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number '{tok}': {e}"))
        })
        .collect()
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let v = parse_floats(s)?;
    if v.len() != 2 {
        return Err(format!("expected 'lo,hi', got '{s}'"));
    }
    Ok((v[0], v[1]))
}

fn find_problem(name: &str) -> Result<RegistryEntry, String> {
    lookup(name).ok_or_else(|| {
        format!(
            "unknown problem '{name}' (known: eikonal+, eikonal-, eikonal-t, diffnorms2, diffnorms7, isaacs, isaacs-cc, quadcopter)"
        )
    })
}

fn pick_solver(entry: &RegistryEntry, problem: &AnyProblem, flag: &Option<String>) -> Result<SolverKind, String> {
    match flag.as_deref() {
        None => Ok(entry.default_solver),
        Some("lax") => Ok(match problem {
            AnyProblem::Control(_) => SolverKind::LaxOc,
            AnyProblem::Game(_) => SolverKind::LaxDg,
        }),
        Some("hopf") => Ok(match problem {
            AnyProblem::Control(_) => SolverKind::HopfOc,
            AnyProblem::Game(_) => SolverKind::HopfDg,
        }),
        Some(other) => match SolverKind::parse(other) {
            Some(k) => Ok(k),
            None => Err(format!("unknown solver '{other}' (lax | hopf)")),
        },
    }
}

fn build_for_point(entry: &RegistryEntry, point: &[f64]) -> Result<AnyProblem, String> {
    entry.build_for_point(point).ok_or_else(|| {
        let want = match entry.dim {
            DimRule::Fixed(d) => format!("{d}"),
            DimRule::AtLeast(d) => format!(">= {d}"),
        };
        format!(
            "problem '{}' expects dimension {want}, got a {}-dimensional point",
            entry.name,
            point.len()
        )
    })
}

fn write_file(path: &str, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("cannot write {path}: {e}"))
}

fn run() -> Result<u8, String> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return Ok(0);
        }
        Err(e) => return Err(e.to_string()),
    };
    match cli.command {
        Command::Solve {
            problem,
            point,
            time,
            solver,
            strict,
            overrides,
        } => {
            let entry = find_problem(&problem)?;
            let point = parse_floats(&point)?;
            let built = build_for_point(&entry, &point)?;
            let solver = pick_solver(&entry, &built, &solver)?;
            let cfg = resolve_config((entry.default_config)(&point, time), &overrides)?;
            let report = solve_point(&built, solver, &point, time, &cfg).map_err(|e| e.to_string())?;
            println!("fval = {}", fmt_float(report.fval));
            println!("iterations = {}", report.iterations);
            println!("stop_reason = {}", report.stop_reason.name());
            println!("converged = {}", report.converged);
            if strict && !report.accepted(cfg.accept_at_cap) {
                return Ok(2);
            }
            Ok(0)
        }
        Command::Grid {
            problem,
            times,
            out,
            mesh,
            axes,
            base,
            range,
            range_b,
            solver,
            threads,
            overrides,
        } => {
            let entry = find_problem(&problem)?;
            let times = parse_floats(&times)?;
            let axes: Vec<usize> = axes
                .split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;
            if axes.len() != 2 {
                return Err("--axes expects two indices".into());
            }
            let range_a = parse_pair(&range)?;
            let range_b = match range_b {
                Some(s) => parse_pair(&s)?,
                None => range_a,
            };
            let dim = match (&base, entry.dim) {
                (Some(b), _) => parse_floats(b)?.len(),
                (None, DimRule::Fixed(d)) => d,
                (None, DimRule::AtLeast(d)) => d.max(2),
            };
            let base = match base {
                Some(b) => parse_floats(&b)?,
                None => vec![0.0; dim],
            };
            let built = build_for_point(&entry, &base)?;
            let solver = pick_solver(&entry, &built, &solver)?;
            let cfg = resolve_config((entry.default_config)(&base, times[0]), &overrides)?;
            let slice = SliceGrid::new(base, axes[0], axes[1], range_a, range_b, mesh)
                .map_err(|e| e.to_string())?;
            let rule = entry.sigma_rule.clone();
            let rule_ref: Option<&(dyn Fn(&[f64]) -> f64 + Sync)> =
                rule.as_deref().map(|r| r as &(dyn Fn(&[f64]) -> f64 + Sync));
            let sweep = || eval_slice(&built, solver, &slice, &times, &cfg, rule_ref);
            let fields = match threads {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| e.to_string())?
                    .install(sweep),
                None => sweep(),
            }
            .map_err(|e| e.to_string())?;
            let mut csv = String::new();
            write_field_csv(&mut csv, &fields);
            write_file(&out, &csv)?;
            for f in &fields {
                let failed = f.failed_nodes();
                println!(
                    "t = {}: {} nodes, {:.1}% converged, {} failed, mean {:.2e} s/point",
                    f.time,
                    f.points.len(),
                    100.0 * f.accepted_fraction(cfg.accept_at_cap),
                    failed.len(),
                    f.mean_point_seconds
                );
                if !failed.is_empty() && failed.len() <= 20 {
                    println!("  failed nodes (i,j): {failed:?}");
                }
            }
            println!("wrote {out}");
            Ok(0)
        }
        Command::Contour { r#in, out, level } => {
            let text =
                std::fs::read_to_string(&r#in).map_err(|e| format!("cannot read {}: {e}", r#in))?;
            let fields = parse_field_csv(&text)?;
            let per_time: Vec<(f64, Vec<_>)> = fields
                .iter()
                .map(|f: &SliceField| (f.time, extract_zero_level(&f.to_field2(), level)))
                .collect();
            let mut csv = String::new();
            write_contour_csv(&mut csv, &per_time);
            write_file(&out, &csv)?;
            for (t, segs) in &per_time {
                println!("t = {t}: {} segments", segs.len());
            }
            println!("wrote {out}");
            Ok(0)
        }
        Command::Traj {
            problem,
            target,
            time,
            out,
            solver,
            overrides,
        } => {
            let entry = find_problem(&problem)?;
            let target = parse_floats(&target)?;
            let built = build_for_point(&entry, &target)?;
            let solver = pick_solver(&entry, &built, &solver)?;
            let base_cfg = match &entry.traj_config {
                Some(f) => f(&target, time),
                None => (entry.default_config)(&target, time),
            };
            let cfg: PdhgConfig = resolve_config(base_cfg, &overrides)?;
            let report = solve_point(&built, solver, &target, time, &cfg).map_err(|e| e.to_string())?;
            let scheme = match solver {
                SolverKind::LaxOc | SolverKind::LaxDg => Scheme::Lax,
                SolverKind::HopfOc | SolverKind::HopfDg => Scheme::Hopf,
            };
            let grid = TimeGrid::new(time, cfg.delta, scheme).map_err(|e| e.to_string())?;
            let rows = match &built {
                AnyProblem::Control(p) => {
                    trajectory_points(p, &report.trajectory, &grid).map_err(|e| e.to_string())?
                }
                AnyProblem::Game(_) => {
                    // stack (x, y) and (p, q) per slot
                    let traj = &report.trajectory;
                    let (y, q) = (traj.y.as_ref().unwrap(), traj.q.as_ref().unwrap());
                    (grid.first_slot()..=grid.n_steps())
                        .map(|j| {
                            let mut state = traj.x.slot(j).to_vec();
                            state.extend_from_slice(y.slot(j));
                            let mut costate = traj.p.slot(j).to_vec();
                            costate.extend_from_slice(q.slot(j));
                            (grid.node(j), state, costate)
                        })
                        .collect()
                }
            };
            let mut csv = String::new();
            write_trajectory_csv(&mut csv, &rows);
            write_file(&out, &csv)?;
            println!("fval = {}", fmt_float(report.fval));
            println!("iterations = {}", report.iterations);
            println!("stop_reason = {}", report.stop_reason.name());
            println!("rows = {}", rows.len());
            println!("wrote {out}");
            Ok(0)
        }
        Command::Scale {
            problem,
            dims,
            time,
            out,
            repeats,
            point,
            overrides,
        } => {
            let entry = find_problem(&problem)?;
            let dims: Vec<usize> = dims
                .split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;
            if let Some(&d) = dims.iter().find(|&&d| !entry.dim.accepts(d)) {
                return Err(format!("problem '{}' cannot be built at dimension {d}", entry.name));
            }
            let head = parse_floats(&point)?;
            let min_dim = dims.first().copied().unwrap_or(2);
            if head.len() > min_dim {
                return Err("--point has more coordinates than the smallest dimension".into());
            }
            let probe = vec![0.0; min_dim];
            let cfg = resolve_config((entry.default_config)(&probe, time), &overrides)?;
            let build = entry.build.clone();
            let family = move |d: usize| match build(d) {
                AnyProblem::Control(p) => p,
                AnyProblem::Game(_) => unreachable!("scale requires a control problem"),
            };
            if matches!((entry.build)(min_dim), AnyProblem::Game(_)) {
                return Err("scale supports control problems only".into());
            }
            let head_rule = head.clone();
            let point_rule = move |d: usize| {
                let mut p = vec![0.0; d];
                p[..head_rule.len()].copy_from_slice(&head_rule);
                p
            };
            let result = scaling_run(&family, &dims, &point_rule, time, &cfg, repeats)
                .map_err(|e| e.to_string())?;
            let mut csv = String::new();
            write_scaling_csv(&mut csv, &result);
            write_file(&out, &csv)?;
            println!(
                "linear fit: {} * d + {} (r2 = {})",
                fmt_float(result.fit_linear.0),
                fmt_float(result.fit_linear.1),
                fmt_float(result.r2_linear)
            );
            println!(
                "quadratic fit: {} * d^2 + {} * d + {}",
                fmt_float(result.fit_quad.0),
                fmt_float(result.fit_quad.1),
                fmt_float(result.fit_quad.2)
            );
            println!("wrote {out}");
            Ok(0)
        }
        Command::Lf {
            problem,
            times,
            out,
            mesh,
            range,
            cfl,
            pad,
            diff,
        } => {
            let entry = find_problem(&problem)?;
            let lf = entry
                .lf
                .as_ref()
                .ok_or_else(|| format!("problem '{}' has no 2-D reference form", entry.name))?;
            let times = parse_floats(&times)?;
            let (lo, hi) = parse_pair(&range)?;
            let mut params = LfParams::new([(lo, hi), (lo, hi)], mesh, lf.alpha);
            params.cfl = cfl;
            params.pad = pad;
            let lf_fields = lax_friedrichs_2d(&*lf.hamiltonian, &*lf.initial, &params, &times)
                .map_err(|e| e.to_string())?;

            // emit with the field CSV schema; iterations carries the LF
            // step count, stop_reason marks the oracle
            let alpha_max = lf.alpha[0].max(lf.alpha[1]);
            let dt = cfl * mesh / alpha_max;
            let mut csv = String::from("t,a,b,value,iterations,converged,stop_reason\n");
            for f in &lf_fields {
                let steps = (f.time / dt).ceil() as usize;
                for (i, a) in f.xs.iter().enumerate() {
                    for (j, b) in f.ys.iter().enumerate() {
                        csv.push_str(&format!(
                            "{},{},{},{},{},true,lf\n",
                            fmt_float(f.time),
                            fmt_float(*a),
                            fmt_float(*b),
                            fmt_float(f.value(i, j)),
                            steps
                        ));
                    }
                }
            }
            write_file(&out, &csv)?;
            println!("wrote {out}");

            if let Some(diff_path) = diff {
                let text = std::fs::read_to_string(&diff_path)
                    .map_err(|e| format!("cannot read {diff_path}: {e}"))?;
                let pdhg_fields = parse_field_csv(&text)?;
                for pf in &pdhg_fields {
                    let Some(lff) = lf_fields
                        .iter()
                        .find(|f| (f.time - pf.time).abs() < 1e-9)
                    else {
                        println!("t = {}: no matching reference time", pf.time);
                        continue;
                    };
                    let mut max_dv = 0.0f64;
                    for p in &pf.points {
                        if p.value.is_finite() {
                            max_dv = max_dv.max((p.value - lff.interpolate(p.a, p.b)).abs());
                        }
                    }
                    let pd_contour = extract_zero_level(&pf.to_field2(), 0.0);
                    let lf_contour = extract_zero_level(
                        &Field2 {
                            xs: lff.xs.clone(),
                            ys: lff.ys.clone(),
                            values: lff.values.clone(),
                        },
                        0.0,
                    );
                    let hd = hausdorff_distance(&pd_contour, &lf_contour, |_| false);
                    println!(
                        "t = {}: max|diff| = {} hausdorff(zero level) = {}",
                        pf.time,
                        fmt_float(max_dv),
                        fmt_float(hd)
                    );
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("{message}");
            ExitCode::from(1)
        }
    }
}
