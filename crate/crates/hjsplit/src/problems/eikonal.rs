//! State-dependent Eikonal problems, `H(x, p) = +/- c(x) ||p||_2`.
//!
//! The positive equation is solved directly: the multiplier update is the
//! closed-form prox of `delta c(x) || . ||_2` (a shrink), the state update
//! one gradient step. The negative equation uses the sign-flip reduction
//! available whenever `H(x, -p, t) = H(x, p, t)`: solve the positive
//! equation with data `-g` (the prox of the concave quadratic is the
//! stretch operator) and negate the reported value.

use super::bump::BumpSpeed;
use crate::operators::{shrink2_mut, DiagQuadratic};
use crate::problem::{ControlProblem, InitialData, ProxRule, UpdateCtx};
use std::sync::Arc;

/// The quadratic-data weights `diag(2.5^2, 1, 0.5^2, ..., 0.5^2)`.
pub fn eikonal_g_weights(dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|i| match i {
            0 => 6.25,
            1 => 1.0,
            _ => 0.25,
        })
        .collect()
}

/// `g(x) = -1/2 + <A^{-1} x, x> / 2` with the weights above.
pub fn eikonal_g(dim: usize) -> DiagQuadratic {
    DiagQuadratic::new(-0.5, eikonal_g_weights(dim))
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn eikonal_core(dim: usize, bump: BumpSpeed, drift: Option<Vec<f64>>, data: InitialData, negate: bool) -> ControlProblem {
    let speed_at = {
        let bump = bump.clone();
        let drift = drift.clone();
        Arc::new(move |x: &[f64], s: f64| match &drift {
            None => bump.value(x),
            Some(d) => bump.value_shifted(x, s, d),
        })
    };
    let speed_grad = {
        let bump = bump.clone();
        let drift = drift.clone();
        Arc::new(move |x: &[f64], s: f64, out: &mut [f64]| match &drift {
            None => bump.grad(x, out),
            Some(d) => bump.grad_shifted(x, s, d, out),
        })
    };

    let h_speed = speed_at.clone();
    let gx_speed = speed_grad;
    let gp_speed = speed_at.clone();
    let prox_speed = speed_at;

    ControlProblem {
        dim,
        hamiltonian: Arc::new(move |x: &[f64], p: &[f64], s| h_speed(x, s) * norm2(p)),
        grad_x: Arc::new(move |x: &[f64], p: &[f64], s, out: &mut [f64]| {
            gx_speed(x, s, out);
            let np = norm2(p);
            for o in out.iter_mut() {
                *o *= np;
            }
        }),
        grad_p: Arc::new(move |x: &[f64], p: &[f64], s, out: &mut [f64]| {
            let np = norm2(p);
            if np == 0.0 {
                out.fill(0.0);
            } else {
                let c = gp_speed(x, s) / np;
                for (o, pi) in out.iter_mut().zip(p) {
                    *o = c * pi;
                }
            }
        }),
        p_update: ProxRule::Prox(Arc::new(move |anchor: &[f64], ctx: &UpdateCtx, out: &mut [f64]| {
            out.copy_from_slice(anchor);
            shrink2_mut(out, ctx.step * prox_speed(ctx.x, ctx.s));
        })),
        x_update: ProxRule::GradStep,
        initial_data: data,
        negate_value: negate,
    }
}

/// `H(x, p) = c(x) ||p||_2` with the benchmark bump field.
pub fn eikonal_plus(dim: usize) -> ControlProblem {
    eikonal_plus_with(dim, BumpSpeed::benchmark(dim))
}

/// Positive Eikonal with a custom speed field (amplitude 0 gives the
/// constant-speed problem).
pub fn eikonal_plus_with(dim: usize, bump: BumpSpeed) -> ControlProblem {
    let data = InitialData::from_diag_quadratic(eikonal_g(dim));
    eikonal_core(dim, bump, None, data, false)
}

/// `H(x, p) = -c(x) ||p||_2` through the sign-flip reduction: internally
/// the positive equation with data `-g`, with the reported value negated.
pub fn eikonal_minus(dim: usize) -> ControlProblem {
    let data = InitialData::from_negated_diag_quadratic(eikonal_g(dim));
    eikonal_core(dim, BumpSpeed::benchmark(dim), None, data, true)
}

/// `H(x, p, s) = c(x - s * drift) ||p||_2`: the bump translates along
/// `drift` as time advances.
pub fn eikonal_time(dim: usize, drift: Vec<f64>) -> ControlProblem {
    assert_eq!(drift.len(), dim);
    let data = InitialData::from_diag_quadratic(eikonal_g(dim));
    eikonal_core(dim, BumpSpeed::benchmark(dim), Some(drift), data, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::check_control_gradients;

    #[test]
    fn hamiltonian_values() {
        let p = eikonal_plus(2);
        assert!(((p.hamiltonian)(&[1.0, 1.0], &[3.0, 4.0], 0.0) - 20.0).abs() < 1e-12);
        assert_eq!((p.hamiltonian)(&[0.3, -2.0], &[0.0, 0.0], 0.0), 0.0);
        let mut g = vec![0.0; 2];
        (p.grad_x)(&[1.0, 1.0], &[0.5, 0.2], 0.0, &mut g);
        assert!(g.iter().all(|v| v.abs() < 1e-14), "bump peak is a critical point");
    }

    #[test]
    fn gradients_match_finite_differences() {
        for problem in [eikonal_plus(3), eikonal_minus(3), eikonal_time(3, vec![-1.0, 1.0, 0.0])] {
            assert!(check_control_gradients(&problem, 100, 23) <= 1e-5);
        }
    }

    #[test]
    fn time_dependent_reduces_to_static_at_s0() {
        let a = eikonal_plus(2);
        let b = eikonal_time(2, vec![-1.0, 1.0]);
        for pt in [([0.3, 0.4], [1.0, -2.0]), ([-1.0, 2.0], [0.1, 0.7])] {
            let (x, p) = pt;
            assert!(
                ((a.hamiltonian)(&x, &p, 0.0) - (b.hamiltonian)(&x, &p, 0.0)).abs() < 1e-14
            );
        }
    }

    #[test]
    fn translation_identity() {
        let b = eikonal_time(2, vec![-1.0, 1.0]);
        let a = eikonal_plus(2);
        for s in [0.1, 0.25, 0.4] {
            let x = [0.5, -0.2];
            let moved = [x[0] + s * -1.0, x[1] + s * 1.0];
            let p = [0.4, 1.2];
            assert!(
                ((b.hamiltonian)(&moved, &p, s) - (a.hamiltonian)(&x, &p, 0.0)).abs() < 1e-13
            );
        }
    }

    #[test]
    fn minus_wrapper_negates_data() {
        let m = eikonal_minus(2);
        let plus_g = eikonal_g(2);
        assert!(((m.initial_data.g)(&[0.5, 0.5]) + plus_g.value(&[0.5, 0.5])).abs() < 1e-15);
        assert!(m.negate_value);
        assert!(m.initial_data.conjugate.is_none());
    }
}
