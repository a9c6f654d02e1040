//! Difference-of-norms game, `H = c1(z) ||p||_2 - c2(z) ||q||_2` on the
//! stacked state `z = (x, y)`, with `c2(z) = c1(-z)`.
//!
//! Both multiplier updates are shrink proxes (the norm terms enter each
//! block objective with a positive sign); the state updates are gradient
//! steps. The initial data is the shared diagonal quadratic on the
//! stacked state, handled by its conditional prox in `x` and the stretch
//! operator in `y`.

use super::bump::BumpSpeed;
use super::eikonal::eikonal_g_weights;
use crate::operators::{shrink2_mut, DiagQuadratic};
use crate::problem::{GameInitialData, GameProblem, ProxRule, UpdateCtx};
use std::sync::Arc;

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn stack(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut z = Vec::with_capacity(x.len() + y.len());
    z.extend_from_slice(x);
    z.extend_from_slice(y);
    z
}

/// Builds the game with block dimensions `(dim_x, dim_y)`; the registry
/// runs `(1, 1)` in two total dimensions and `(1, 6)` in seven.
pub fn diff_norms(dim_x: usize, dim_y: usize) -> GameProblem {
    let dim = dim_x + dim_y;
    let bump = BumpSpeed::benchmark(dim);
    let c1 = {
        let bump = bump.clone();
        Arc::new(move |z: &[f64]| bump.value(z))
    };
    let c2 = {
        let bump = bump.clone();
        Arc::new(move |z: &[f64]| {
            let neg: Vec<f64> = z.iter().map(|v| -v).collect();
            bump.value(&neg)
        })
    };
    // grad of c1(z) + sign * grad of c2(z), split later into blocks
    let grad_c = {
        let bump = bump.clone();
        Arc::new(move |z: &[f64], np: f64, nq: f64, out: &mut [f64]| {
            let mut g1 = vec![0.0; z.len()];
            bump.grad(z, &mut g1);
            let neg: Vec<f64> = z.iter().map(|v| -v).collect();
            let mut g2 = vec![0.0; z.len()];
            bump.grad(&neg, &mut g2);
            // d/dz c2(z) = -grad c1(-z)
            for i in 0..z.len() {
                out[i] = g1[i] * np + g2[i] * nq;
            }
        })
    };

    let h_c1 = c1.clone();
    let h_c2 = c2.clone();
    let hamiltonian = Arc::new(move |x: &[f64], y: &[f64], p: &[f64], qn: &[f64], _s: f64| {
        let z = stack(x, y);
        h_c1(&z) * norm2(p) - h_c2(&z) * norm2(qn)
    });

    let gx = grad_c.clone();
    let grad_x = Arc::new(move |x: &[f64], y: &[f64], p: &[f64], qn: &[f64], _s: f64, out: &mut [f64]| {
        let z = stack(x, y);
        let mut full = vec![0.0; z.len()];
        gx(&z, norm2(p), norm2(qn), &mut full);
        out.copy_from_slice(&full[..x.len()]);
    });
    let gy = grad_c;
    let grad_y = Arc::new(move |x: &[f64], y: &[f64], p: &[f64], qn: &[f64], _s: f64, out: &mut [f64]| {
        let z = stack(x, y);
        let mut full = vec![0.0; z.len()];
        gy(&z, norm2(p), norm2(qn), &mut full);
        out.copy_from_slice(&full[x.len()..]);
    });

    let gp_c = c1.clone();
    let grad_p = Arc::new(move |x: &[f64], y: &[f64], p: &[f64], _qn: &[f64], _s: f64, out: &mut [f64]| {
        let np = norm2(p);
        if np == 0.0 {
            out.fill(0.0);
            return;
        }
        let c = gp_c(&stack(x, y)) / np;
        for (o, pi) in out.iter_mut().zip(p) {
            *o = c * pi;
        }
    });
    let gq_c = c2.clone();
    let grad_qneg = Arc::new(move |x: &[f64], y: &[f64], _p: &[f64], qn: &[f64], _s: f64, out: &mut [f64]| {
        let nq = norm2(qn);
        if nq == 0.0 {
            out.fill(0.0);
            return;
        }
        let c = -gq_c(&stack(x, y)) / nq;
        for (o, qi) in out.iter_mut().zip(qn) {
            *o = c * qi;
        }
    });

    let p_c1 = c1;
    let p_update = ProxRule::Prox(Arc::new(move |anchor: &[f64], ctx: &UpdateCtx, out: &mut [f64]| {
        out.copy_from_slice(anchor);
        shrink2_mut(out, ctx.step * p_c1(&stack(ctx.x, ctx.y)));
    }));
    let q_c2 = c2;
    let q_update = ProxRule::Prox(Arc::new(move |anchor: &[f64], ctx: &UpdateCtx, out: &mut [f64]| {
        // argmin_q  -delta H(.., p, -q, ..) + |q - a|^2/(2 sigma) reduces
        // to the prox of delta c2 ||q||
        out.copy_from_slice(anchor);
        shrink2_mut(out, ctx.step * q_c2(&stack(ctx.x, ctx.y)));
    }));

    let weights = eikonal_g_weights(dim);
    let g_full = DiagQuadratic::new(-0.5, weights.clone());
    let gx_quad = DiagQuadratic::new(0.0, weights[..dim_x].to_vec());
    let gy_quad = DiagQuadratic::new(0.0, weights[dim_x..].to_vec());

    let g_val = g_full.clone();
    let g = Arc::new(move |x: &[f64], y: &[f64]| g_val.value(&stack(x, y)));
    let gx_data = gx_quad.clone();
    let g_grad_x = Arc::new(move |x: &[f64], _y: &[f64], out: &mut [f64]| gx_data.grad(x, out));
    let gy_data = gy_quad.clone();
    let g_grad_y = Arc::new(move |_x: &[f64], y: &[f64], out: &mut [f64]| gy_data.grad(y, out));
    let prox_x = {
        let quad = gx_quad;
        Arc::new(move |anchor: &[f64], _other: &[f64], lambda: f64, out: &mut [f64]| {
            out.copy_from_slice(anchor);
            quad.prox_mut(out, lambda);
        })
    };
    let prox_y_neg = {
        let quad = gy_quad;
        Arc::new(move |anchor: &[f64], _other: &[f64], lambda: f64, out: &mut [f64]| {
            out.copy_from_slice(anchor);
            quad.stretch_mut(out, lambda);
        })
    };

    GameProblem {
        dim_x,
        dim_y,
        hamiltonian,
        grad_x,
        grad_y,
        grad_p,
        grad_qneg,
        p_update,
        q_update,
        x_update: ProxRule::GradStep,
        y_update: ProxRule::GradStep,
        initial_data: GameInitialData {
            g,
            grad_x: g_grad_x,
            grad_y: g_grad_y,
            prox_x: Some(prox_x),
            prox_y_neg: Some(prox_y_neg),
            e_conjugate: None,
            h_concave: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::check_game_gradients;

    #[test]
    fn hamiltonian_values() {
        let g = diff_norms(1, 1);
        assert_eq!((g.hamiltonian)(&[0.4], &[-0.3], &[0.0], &[0.0], 0.0), 0.0);
        // at the stacked origin c1 = c2, so H = c1(0) (|p| - |q|)
        let c0 = BumpSpeed::benchmark(2).value(&[0.0, 0.0]);
        let h = (g.hamiltonian)(&[0.0], &[0.0], &[2.0], &[1.0], 0.0);
        assert!((h - c0 * (2.0 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn gradients_match_finite_differences() {
        for g in [diff_norms(1, 1), diff_norms(1, 6)] {
            assert!(check_game_gradients(&g, 100, 31) <= 1e-5);
        }
    }
}
