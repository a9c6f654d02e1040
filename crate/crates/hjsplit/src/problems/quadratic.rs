//! A fully quadratic control problem with closed-form block proxes.
//!
//! `H(x, p) = ||p||^2 / 2 + omega ||x||^2 / 2`, `g(x) = ||x||^2 / 2`.
//! Every update admits an exact prox, so the discrete saddle point is an
//! exact fixed point of one iteration; the KKT oracle in [`crate::reference`]
//! solves the same instances by a dense linear solve.

use crate::operators::DiagQuadratic;
use crate::problem::{ControlProblem, InitialData, ProxRule};
use std::sync::Arc;

pub fn quadratic_control(dim: usize, omega: f64) -> ControlProblem {
    assert!(omega >= 0.0);
    let p_prox = Arc::new(move |anchor: &[f64], ctx: &crate::problem::UpdateCtx, out: &mut [f64]| {
        // argmin_p delta ||p||^2/2 + ||p - a||^2 / (2 sigma)
        for (o, a) in out.iter_mut().zip(anchor) {
            *o = a / (1.0 + ctx.step);
        }
    });
    let x_prox = Arc::new(move |anchor: &[f64], ctx: &crate::problem::UpdateCtx, out: &mut [f64]| {
        // argmin_x -delta omega ||x||^2/2 + ||x - a||^2 / (2 tau); well
        // posed while tau*delta*omega < 1
        let denom = 1.0 - ctx.step * omega;
        assert!(denom > 0.0, "x prox needs tau*delta*omega < 1");
        for (o, a) in out.iter_mut().zip(anchor) {
            *o = a / denom;
        }
    });
    ControlProblem {
        dim,
        hamiltonian: Arc::new(move |x: &[f64], p: &[f64], _s| {
            0.5 * p.iter().map(|v| v * v).sum::<f64>()
                + 0.5 * omega * x.iter().map(|v| v * v).sum::<f64>()
        }),
        grad_x: Arc::new(move |x: &[f64], _p: &[f64], _s, out: &mut [f64]| {
            for (o, xi) in out.iter_mut().zip(x) {
                *o = omega * xi;
            }
        }),
        grad_p: Arc::new(|_x: &[f64], p: &[f64], _s, out: &mut [f64]| {
            out.copy_from_slice(p);
        }),
        p_update: ProxRule::Prox(p_prox),
        x_update: ProxRule::Prox(x_prox),
        initial_data: InitialData::from_diag_quadratic(DiagQuadratic::new(0.0, vec![1.0; dim])),
        negate_value: false,
    }
}
