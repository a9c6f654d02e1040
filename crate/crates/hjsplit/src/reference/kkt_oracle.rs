//! Exact discrete saddle points of quadratic 1-D instances by a dense
//! linear solve of the stationarity system. Used to pin the fixed-point
//! behavior of the splitting iterations.

use super::dense::solve;
use super::ReferenceError;
use crate::bundle::{Bundle, TrajectoryBundle};
use crate::operators::DiagQuadratic;
use crate::time_grid::{Scheme, TimeGrid};

/// `H(x, p) = p^2/2 + omega x^2/2` with quadratic data `g`.
#[derive(Debug, Clone)]
pub struct Quadratic1d {
    pub omega: f64,
    pub g: DiagQuadratic,
}

impl Quadratic1d {
    pub fn new(omega: f64, g: DiagQuadratic) -> Self {
        assert_eq!(g.diag().len(), 1);
        Quadratic1d { omega, g }
    }
}

/// Assembles and densely solves the stationarity system
///
/// ```text
/// x_j - x_{j-1} - delta p_j        = 0   (j = 1..N)
/// p_j - p_{j+1} - delta omega x_j  = 0   (j = 1..N-1)
/// g'(x_0) - p_1                    = 0
/// ```
///
/// with `x_N` pinned at the target. Returns the exact saddle bundle and
/// the objective value computed from the oracle's own formula.
pub fn kkt_linear_oracle(
    spec: &Quadratic1d,
    target: f64,
    grid: &TimeGrid,
) -> Result<(TrajectoryBundle, f64), ReferenceError> {
    assert_eq!(grid.scheme(), Scheme::Lax);
    let n = grid.n_steps();
    let delta = grid.delta();
    let a = spec.g.diag()[0];
    // unknowns: [x_0 .. x_{N-1}, p_1 .. p_N]
    let dim = 2 * n;
    let xi = |j: usize| j; // x_j, j < N
    let pi = |j: usize| n + (j - 1); // p_j, j >= 1
    let mut mat = vec![vec![0.0; dim]; dim];
    let mut rhs = vec![0.0; dim];
    let mut row = 0;
    for j in 1..=n {
        if j < n {
            mat[row][xi(j)] = 1.0;
        } else {
            rhs[row] -= target;
        }
        mat[row][xi(j - 1)] = -1.0;
        mat[row][pi(j)] = -delta;
        row += 1;
    }
    for j in 1..n {
        mat[row][pi(j)] = 1.0;
        mat[row][pi(j + 1)] = -1.0;
        mat[row][xi(j)] = -delta * spec.omega;
        row += 1;
    }
    mat[row][xi(0)] = 1.0 / a;
    mat[row][pi(1)] = -1.0;
    debug_assert_eq!(row + 1, dim);

    let sol = solve(mat, rhs).ok_or(ReferenceError::SingularSystem)?;

    let mut x = Bundle::for_grid(1, grid);
    let mut p = Bundle::for_grid(1, grid);
    for j in 0..n {
        x.slot_mut(j)[0] = sol[xi(j)];
    }
    x.slot_mut(n)[0] = target;
    for j in 1..=n {
        p.slot_mut(j)[0] = sol[pi(j)];
    }

    let mut fval = spec.g.value(x.slot(0));
    for j in 1..=n {
        let (xj, xm, pj) = (x.slot(j)[0], x.slot(j - 1)[0], p.slot(j)[0]);
        fval += pj * (xj - xm) - delta * (0.5 * pj * pj + 0.5 * spec.omega * xj * xj);
    }

    let z = x.clone();
    Ok((
        TrajectoryBundle {
            x,
            p,
            z,
            y: None,
            q: None,
            w: None,
        },
        fval,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdhg_oc::{fval_lax_oc, kkt_residual_oc};
    use crate::problems::quadratic::quadratic_control;
    use crate::rng::Xoshiro256;

    #[test]
    fn single_step_matches_hand_elimination() {
        // N = 1: p_1 = x_0 / a and x_0 (1 + delta/a) = target
        let grid = TimeGrid::new(0.1, 0.1, Scheme::Lax).unwrap();
        let spec = Quadratic1d::new(0.0, DiagQuadratic::new(0.0, vec![2.0]));
        let (bundle, _) = kkt_linear_oracle(&spec, 1.5, &grid).unwrap();
        let x0 = 1.5 / (1.0 + 0.1 / 2.0);
        assert!((bundle.x.slot(0)[0] - x0).abs() < 1e-12);
        assert!((bundle.p.slot(1)[0] - x0 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn residuals_vanish_on_oracle_output() {
        let grid = TimeGrid::new(0.25, 0.05, Scheme::Lax).unwrap();
        let mut rng = Xoshiro256::seed_from(71);
        for _ in 0..5 {
            let a = 0.5 + 2.0 * rng.next_f64();
            let omega = rng.next_f64();
            let target = rng.next_symmetric(2.0);
            let spec = Quadratic1d::new(omega, DiagQuadratic::new(0.0, vec![a]));
            let (bundle, oracle_fval) = kkt_linear_oracle(&spec, target, &grid).unwrap();

            let problem = quadratic_control(1, omega);
            // swap in the oracle's g weights
            let mut problem = problem;
            problem.initial_data = crate::problem::InitialData::from_diag_quadratic(
                DiagQuadratic::new(0.0, vec![a]),
            );
            let res = kkt_residual_oc(&problem, &bundle, &grid).unwrap();
            assert!(res.max() <= 1e-10, "residual {:?}", res);
            let fval = fval_lax_oc(&problem, &bundle, &grid).unwrap();
            assert!((fval - oracle_fval).abs() <= 1e-12);
        }
    }

    #[test]
    fn random_bundle_has_positive_residuals() {
        let grid = TimeGrid::new(0.25, 0.05, Scheme::Lax).unwrap();
        let spec = Quadratic1d::new(0.5, DiagQuadratic::new(0.0, vec![1.0]));
        let (mut bundle, _) = kkt_linear_oracle(&spec, 1.0, &grid).unwrap();
        for v in bundle.x.as_mut_slice() {
            *v += 0.37;
        }
        let problem = quadratic_control(1, 0.5);
        let res = kkt_residual_oc(&problem, &bundle, &grid).unwrap();
        assert!(res.max() > 1e-3);
    }
}
