//! The pursuit game adapted from Isaacs:
//! `H(x, y, p, q) = -c(x, y) q + 2|p| - sqrt(p^2 + q^2) - 1` on scalar
//! blocks, with the doubled bump field.
//!
//! The multiplier update mixes a gradient step on the smooth square-root
//! term with the shrink prox for `2|p|`; the `q` block and both state
//! blocks use gradient steps. Two initial-data variants: the fully convex
//! quadratic (Lax form), and the separable convex-concave
//! `g(x, y) = -1/2 + ((2.5 x)^2 - y^2)/2` (Hopf form with the conjugate
//! pair `e*`, `h_*`).

use super::bump::BumpSpeed;
use crate::operators::{shrink1_mut, ConcaveQuadratic, DiagQuadratic};
use crate::problem::{GameInitialData, GameProblem, ProxRule, UpdateCtx};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsaacsVariant {
    /// Fully convex quadratic data (the Lax-form run; adversarial for the
    /// splitting and excluded from hard accuracy gates).
    Convex,
    /// Separable convex-concave data (the Hopf-form run).
    ConvexConcave,
}

pub fn isaacs(variant: IsaacsVariant) -> GameProblem {
    let bump = BumpSpeed::benchmark_doubled(2);
    let c = {
        let bump = bump.clone();
        Arc::new(move |x: f64, y: f64| bump.value(&[x, y]))
    };

    let h_c = c.clone();
    let hamiltonian = Arc::new(move |x: &[f64], y: &[f64], p: &[f64], qn: &[f64], _s: f64| {
        let (p, q) = (p[0], qn[0]);
        -h_c(x[0], y[0]) * q + 2.0 * p.abs() - (p * p + q * q).sqrt() - 1.0
    });

    let gb = bump.clone();
    let grad_x = Arc::new(move |x: &[f64], y: &[f64], _p: &[f64], qn: &[f64], _s: f64, out: &mut [f64]| {
        let mut g = [0.0; 2];
        gb.grad(&[x[0], y[0]], &mut g);
        out[0] = -g[0] * qn[0];
    });
    let gb2 = bump.clone();
    let grad_y = Arc::new(move |x: &[f64], y: &[f64], _p: &[f64], qn: &[f64], _s: f64, out: &mut [f64]| {
        let mut g = [0.0; 2];
        gb2.grad(&[x[0], y[0]], &mut g);
        out[0] = -g[1] * qn[0];
    });
    let grad_p = Arc::new(|_x: &[f64], _y: &[f64], p: &[f64], qn: &[f64], _s: f64, out: &mut [f64]| {
        let (p, q) = (p[0], qn[0]);
        let r = (p * p + q * q).sqrt();
        let sgn = if p > 0.0 {
            1.0
        } else if p < 0.0 {
            -1.0
        } else {
            0.0
        };
        out[0] = 2.0 * sgn - if r == 0.0 { 0.0 } else { p / r };
    });
    let gq_c = c.clone();
    let grad_qneg = Arc::new(move |x: &[f64], y: &[f64], p: &[f64], qn: &[f64], _s: f64, out: &mut [f64]| {
        let (p, q) = (p[0], qn[0]);
        let r = (p * p + q * q).sqrt();
        out[0] = -gq_c(x[0], y[0]) - if r == 0.0 { 0.0 } else { q / r };
    });

    // p block: gradient step on -sqrt(p^2 + q^2), then the prox of
    // 2 delta |p|; the -c q and constant terms do not involve p.
    let p_update = ProxRule::Prox(Arc::new(move |anchor: &[f64], ctx: &UpdateCtx, out: &mut [f64]| {
        let p_prev = ctx.p[0];
        let qn = -ctx.q[0];
        let r = (p_prev * p_prev + qn * qn).sqrt();
        let smooth_grad = if r == 0.0 { 0.0 } else { -p_prev / r };
        out[0] = anchor[0] - ctx.step * smooth_grad;
        shrink1_mut(out, 2.0 * ctx.step);
    }));

    let initial_data = match variant {
        IsaacsVariant::Convex => {
            let g_quad = DiagQuadratic::new(-0.5, vec![6.25, 1.0]);
            let gx_quad = DiagQuadratic::new(0.0, vec![6.25]);
            let gy_quad = DiagQuadratic::new(0.0, vec![1.0]);
            let g_val = g_quad;
            GameInitialData {
                g: Arc::new(move |x: &[f64], y: &[f64]| g_val.value(&[x[0], y[0]])),
                grad_x: {
                    let q = gx_quad.clone();
                    Arc::new(move |x: &[f64], _y: &[f64], out: &mut [f64]| q.grad(x, out))
                },
                grad_y: {
                    let q = gy_quad.clone();
                    Arc::new(move |_x: &[f64], y: &[f64], out: &mut [f64]| q.grad(y, out))
                },
                prox_x: Some({
                    let q = gx_quad;
                    Arc::new(move |anchor: &[f64], _o: &[f64], lambda: f64, out: &mut [f64]| {
                        out.copy_from_slice(anchor);
                        q.prox_mut(out, lambda);
                    })
                }),
                prox_y_neg: Some({
                    let q = gy_quad;
                    Arc::new(move |anchor: &[f64], _o: &[f64], lambda: f64, out: &mut [f64]| {
                        out.copy_from_slice(anchor);
                        q.stretch_mut(out, lambda);
                    })
                }),
                e_conjugate: None,
                h_concave: None,
            }
        }
        IsaacsVariant::ConvexConcave => {
            // e(x) = -1/2 + (2.5 x)^2 / 2 = -1/2 + x^2 / (2 * 0.16)
            let e = DiagQuadratic::new(-0.5, vec![0.16]);
            let h = ConcaveQuadratic::new(0.0, vec![1.0]);
            let (e_v, h_v) = (e.clone(), h.clone());
            GameInitialData {
                g: Arc::new(move |x: &[f64], y: &[f64]| e_v.value(x) + h_v.value(y)),
                grad_x: {
                    let e = e.clone();
                    Arc::new(move |x: &[f64], _y: &[f64], out: &mut [f64]| e.grad(x, out))
                },
                grad_y: {
                    let h = h.clone();
                    Arc::new(move |_x: &[f64], y: &[f64], out: &mut [f64]| h.grad(y, out))
                },
                prox_x: Some({
                    let e = e.clone();
                    Arc::new(move |anchor: &[f64], _o: &[f64], lambda: f64, out: &mut [f64]| {
                        out.copy_from_slice(anchor);
                        e.prox_mut(out, lambda);
                    })
                }),
                prox_y_neg: Some({
                    // -g in y is -h(y) = y^2/2, a convex quadratic
                    Arc::new(move |anchor: &[f64], _o: &[f64], lambda: f64, out: &mut [f64]| {
                        for (o, a) in out.iter_mut().zip(anchor) {
                            *o = a / (1.0 + lambda);
                        }
                    })
                }),
                e_conjugate: Some(e.conjugate()),
                h_concave: Some(h),
            }
        }
    };

    GameProblem {
        dim_x: 1,
        dim_y: 1,
        hamiltonian,
        grad_x,
        grad_y,
        grad_p,
        grad_qneg,
        p_update,
        q_update: ProxRule::GradStep,
        x_update: ProxRule::GradStep,
        y_update: ProxRule::GradStep,
        initial_data,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::check_game_gradients;

    #[test]
    fn hamiltonian_values() {
        let g = isaacs(IsaacsVariant::Convex);
        assert!(((g.hamiltonian)(&[0.2], &[-0.4], &[0.0], &[0.0], 0.0) - (-1.0)).abs() < 1e-15);
        assert!(((g.hamiltonian)(&[0.2], &[-0.4], &[1.0], &[0.0], 0.0) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn gradients_match_finite_differences() {
        for v in [IsaacsVariant::Convex, IsaacsVariant::ConvexConcave] {
            assert!(check_game_gradients(&isaacs(v), 100, 41) <= 1e-5);
        }
    }

    #[test]
    fn convex_concave_split_matches_displayed_data() {
        let g = isaacs(IsaacsVariant::ConvexConcave);
        let val = (g.initial_data.g)(&[0.4], &[-0.7]);
        let expected = -0.5 + 0.5 * ((2.5f64 * 0.4).powi(2) - 0.7f64.powi(2));
        assert!((val - expected).abs() < 1e-14);
    }
}
