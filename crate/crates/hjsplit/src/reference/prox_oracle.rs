//! Brute-force proximal minimization: dense search plus golden-section
//! polish. Checks every closed-form prox in the library without sharing
//! any code with it.

const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn golden_section(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let mut a = hi - GOLDEN * (hi - lo);
    let mut b = lo + GOLDEN * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..iters {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - GOLDEN * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + GOLDEN * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

/// `argmin_y f(y) + (y - v)^2 / (2 lambda)` over `[lo, hi]`.
pub fn prox_oracle_1d(f: &dyn Fn(f64) -> f64, v: f64, lambda: f64, lo: f64, hi: f64) -> f64 {
    let objective = |y: f64| f(y) + (y - v) * (y - v) / (2.0 * lambda);
    let n = 2000usize;
    let mut best = lo;
    let mut best_val = objective(lo);
    for k in 1..=n {
        let y = lo + (hi - lo) * k as f64 / n as f64;
        let val = objective(y);
        if val < best_val {
            best_val = val;
            best = y;
        }
    }
    let h = (hi - lo) / n as f64;
    golden_section(&objective, (best - h).max(lo), (best + h).min(hi), 80)
}

/// `argmin_y f(y) + ||y - v||^2 / (2 lambda)` over a box, by a dense
/// 400x400 scan followed by nested zoom grids around the incumbent
/// (coordinate-wise line search can stall on nonsmooth radial terms, a
/// zoomed grid cannot).
pub fn prox_oracle_2d(
    f: &dyn Fn(&[f64]) -> f64,
    v: &[f64],
    lambda: f64,
    lo: [f64; 2],
    hi: [f64; 2],
) -> [f64; 2] {
    let objective = |y: &[f64]| {
        f(y) + ((y[0] - v[0]).powi(2) + (y[1] - v[1]).powi(2)) / (2.0 * lambda)
    };
    let n = 400usize;
    let mut best = [lo[0], lo[1]];
    let mut best_val = objective(&best);
    for i in 0..=n {
        let y0 = lo[0] + (hi[0] - lo[0]) * i as f64 / n as f64;
        for j in 0..=n {
            let y1 = lo[1] + (hi[1] - lo[1]) * j as f64 / n as f64;
            let val = objective(&[y0, y1]);
            if val < best_val {
                best_val = val;
                best = [y0, y1];
            }
        }
    }
    // Zoom refinement. The basin can be a narrow crescent (the norm term
    // has angular curvature ~ 1/r near the origin), so on a failed sweep
    // the stencil densifies before the radius is allowed to shrink.
    let mut radius = 2.0 * (hi[0] - lo[0]).max(hi[1] - lo[1]) / n as f64;
    let mut half: i64 = 15;
    while radius > 1e-9 {
        let mut improved = false;
        let center = best;
        for i in -half..=half {
            for j in -half..=half {
                let y = [
                    center[0] + radius * i as f64 / half as f64,
                    center[1] + radius * j as f64 / half as f64,
                ];
                let val = objective(&y);
                if val < best_val {
                    best_val = val;
                    best = y;
                    improved = true;
                }
            }
        }
        if improved {
            radius /= 6.0;
            half = 15;
        } else if half < 240 {
            half *= 2;
        } else {
            radius /= 6.0;
            half = 15;
        }
    }
    best
}
