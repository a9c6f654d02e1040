//! Brute-force evaluation of the classical (constant-speed) Lax formula.
//!
//! For `H = c ||p||` the convex conjugate is the indicator of the `c`-ball,
//! so the value at `(x, t)` is the minimum of `g` over the closed ball of
//! radius `c t` around `x`. The search is dense radial-angular sampling
//! with local zoom refinement; quadratic test data keeps it honest to far
//! below the tolerances it backs.

/// `min { g(y) : ||y - x||_2 <= c t }` in two dimensions.
pub fn brute_force_lax(g: &dyn Fn(&[f64]) -> f64, c_const: f64, x: &[f64], t: f64) -> f64 {
    assert_eq!(x.len(), 2, "the brute-force Lax oracle is two-dimensional");
    assert!(c_const >= 0.0 && t >= 0.0);
    let radius = c_const * t;
    if radius == 0.0 {
        return g(x);
    }

    let eval = |r: f64, theta: f64| -> f64 {
        let y = [x[0] + r * theta.cos(), x[1] + r * theta.sin()];
        g(&y)
    };

    let (n_r, n_theta) = (400usize, 400usize);
    let mut best = g(x);
    let mut best_rt = (0.0f64, 0.0f64);
    for ir in 0..=n_r {
        let r = radius * ir as f64 / n_r as f64;
        for it in 0..n_theta {
            let theta = std::f64::consts::TAU * it as f64 / n_theta as f64;
            let v = eval(r, theta);
            if v < best {
                best = v;
                best_rt = (r, theta);
            }
        }
    }

    // local zoom around the best sample
    let (mut r0, mut th0) = best_rt;
    let mut dr = radius / n_r as f64;
    let mut dth = std::f64::consts::TAU / n_theta as f64;
    for _ in 0..4 {
        for ir in -20..=20 {
            let r = (r0 + ir as f64 * dr / 20.0).clamp(0.0, radius);
            for it in -20..=20 {
                let theta = th0 + it as f64 * dth / 20.0;
                let v = eval(r, theta);
                if v < best {
                    best = v;
                    r0 = r;
                    th0 = theta;
                }
            }
        }
        dr /= 20.0;
        dth /= 20.0;
    }
    best
}
