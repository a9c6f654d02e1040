//! The 12-dimensional quadcopter problem (Hopf form).
//!
//! State order `(x1, y1, z1, psi1, theta1, phi1, x2, y2, z2, psi2, theta2,
//! phi2)`: positions and Euler angles, then their velocities. Eliminating
//! the thrust and torque controls from the quadratic running cost gives
//!
//! ```text
//! H(x, p) = <(x2, y2, z2), (p1, p2, p3)> + <(psi2, theta2, phi2), (p4, p5, p6)>
//!           + (w . (p7, p8, p9))^2 / (4 m^2) - p9 g
//!           + (p10^2 + p11^2 + p12^2) / 4 - 2
//! ```
//!
//! with `w` the attitude-dependent thrust direction. Both block updates
//! are gradient steps; the conjugate quadratic data feeds the Hopf prox.

use crate::operators::DiagQuadratic;
use crate::problem::{ControlProblem, InitialData, ProxRule};
use std::sync::Arc;

/// Thrust direction as a function of the Euler angles `(psi, theta, phi)`.
fn thrust_dir(psi: f64, theta: f64, phi: f64) -> [f64; 3] {
    [
        phi.sin() * psi.sin() + phi.cos() * psi.cos() * theta.sin(),
        -psi.cos() * phi.sin() + phi.cos() * theta.sin() * psi.sin(),
        theta.cos() * phi.cos(),
    ]
}

/// Partial derivatives of `thrust_dir` in each angle.
fn thrust_dir_jac(psi: f64, theta: f64, phi: f64) -> [[f64; 3]; 3] {
    let (sps, cps) = psi.sin_cos();
    let (sth, cth) = theta.sin_cos();
    let (sph, cph) = phi.sin_cos();
    // d/d psi, d/d theta, d/d phi
    [
        [sph * cps - cph * sps * sth, sps * sph + cph * sth * cps, 0.0],
        [cph * cps * cth, cph * cth * sps, -sth * cph],
        [cph * sps - sph * cps * sth, -cps * cph - sph * sth * sps, -cth * sph],
    ]
}

/// Default constants: unit mass, `g = 9.8`.
pub fn quadcopter() -> ControlProblem {
    quadcopter_with(1.0, 9.8)
}

pub fn quadcopter_with(mass: f64, gravity: f64) -> ControlProblem {
    assert!(mass > 0.0);
    let inv4m2 = 1.0 / (4.0 * mass * mass);
    let inv2m2 = 1.0 / (2.0 * mass * mass);

    let hamiltonian = Arc::new(move |x: &[f64], p: &[f64], _s: f64| {
        let w = thrust_dir(x[3], x[4], x[5]);
        let wp = w[0] * p[6] + w[1] * p[7] + w[2] * p[8];
        let mut h = 0.0;
        for i in 0..3 {
            h += x[6 + i] * p[i];
            h += x[9 + i] * p[3 + i];
        }
        h + wp * wp * inv4m2 - p[8] * gravity + 0.25 * (p[9] * p[9] + p[10] * p[10] + p[11] * p[11])
            - 2.0
    });

    let grad_x = Arc::new(move |x: &[f64], p: &[f64], _s: f64, out: &mut [f64]| {
        out.fill(0.0);
        let w = thrust_dir(x[3], x[4], x[5]);
        let jac = thrust_dir_jac(x[3], x[4], x[5]);
        let wp = w[0] * p[6] + w[1] * p[7] + w[2] * p[8];
        for a in 0..3 {
            let dwp = jac[a][0] * p[6] + jac[a][1] * p[7] + jac[a][2] * p[8];
            out[3 + a] = wp * dwp * inv2m2;
        }
        for i in 0..3 {
            out[6 + i] = p[i];
            out[9 + i] = p[3 + i];
        }
    });

    let grad_p = Arc::new(move |x: &[f64], p: &[f64], _s: f64, out: &mut [f64]| {
        let w = thrust_dir(x[3], x[4], x[5]);
        let wp = w[0] * p[6] + w[1] * p[7] + w[2] * p[8];
        for i in 0..3 {
            out[i] = x[6 + i];
            out[3 + i] = x[9 + i];
            out[6 + i] = wp * w[i] * inv2m2;
            out[9 + i] = 0.5 * p[9 + i];
        }
        out[8] -= gravity;
    });

    ControlProblem {
        dim: 12,
        hamiltonian,
        grad_x,
        grad_p,
        p_update: ProxRule::GradStep,
        x_update: ProxRule::GradStep,
        initial_data: InitialData::from_diag_quadratic(quadcopter_g()),
        negate_value: false,
    }
}

/// `g(x) = -1/2 + <A^{-1} x, x> / 2`, `A = diag(0.2, 1, ..., 1)`.
pub fn quadcopter_g() -> DiagQuadratic {
    let mut diag = vec![1.0; 12];
    diag[0] = 0.2;
    DiagQuadratic::new(-0.5, diag)
}
