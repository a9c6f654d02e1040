//! Proximal operators, diagonal-quadratic conjugates, and the two
//! time-difference operators with their transposes.
//!
//! The difference operators are never materialized in the solver path; the
//! solvers use the slot-wise formulas below. Dense block matrices exist
//! only in tests, where they check these formulas entry by entry.

use crate::bundle::Bundle;
use crate::time_grid::Scheme;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("bundle shape mismatch: expected dim {expected_dim} with first slot {expected_first}, got dim {dim} with first slot {first}")]
    ShapeMismatch {
        expected_dim: usize,
        expected_first: usize,
        dim: usize,
        first: usize,
    },
    #[error("stretch step {tau} is not below the smallest curvature weight {min_diag}; the prox objective is unbounded below")]
    StretchStep { tau: f64, min_diag: f64 },
}

/// Soft-thresholding, the prox of `lambda * ||.||_1`, componentwise.
pub fn shrink1_mut(v: &mut [f64], lambda: f64) {
    debug_assert!(lambda >= 0.0);
    for x in v {
        *x = if *x > lambda {
            *x - lambda
        } else if *x < -lambda {
            *x + lambda
        } else {
            0.0
        };
    }
}

pub fn shrink1(v: &[f64], lambda: f64) -> Vec<f64> {
    let mut out = v.to_vec();
    shrink1_mut(&mut out, lambda);
    out
}

/// The prox of `lambda * ||.||_2`: scales `v` by `max(||v|| - lambda, 0) / ||v||`,
/// with `0` mapped to `0`.
pub fn shrink2_mut(v: &mut [f64], lambda: f64) {
    debug_assert!(lambda >= 0.0);
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return;
    }
    let scale = (norm - lambda).max(0.0) / norm;
    for x in v {
        *x *= scale;
    }
}

pub fn shrink2(v: &[f64], lambda: f64) -> Vec<f64> {
    let mut out = v.to_vec();
    shrink2_mut(&mut out, lambda);
    out
}

/// `g(x) = offset + (1/2) <A^{-1} x, x>` with `A = diag(a_1..a_d)`, all
/// `a_i > 0`. This is the quadratic initial-data family used throughout
/// the problem library.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagQuadratic {
    offset: f64,
    diag: Vec<f64>,
}

impl DiagQuadratic {
    pub fn new(offset: f64, diag: Vec<f64>) -> Self {
        assert!(
            diag.iter().all(|a| *a > 0.0),
            "DiagQuadratic weights must be positive"
        );
        DiagQuadratic { offset, diag }
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn min_diag(&self) -> f64 {
        self.diag.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.offset
            + 0.5
                * x.iter()
                    .zip(&self.diag)
                    .map(|(xi, ai)| xi * xi / ai)
                    .sum::<f64>()
    }

    pub fn grad(&self, x: &[f64], out: &mut [f64]) {
        for ((o, xi), ai) in out.iter_mut().zip(x).zip(&self.diag) {
            *o = xi / ai;
        }
    }

    /// `prox_{lambda g}(v)`, componentwise `v_i / (1 + lambda / a_i)`.
    pub fn prox_mut(&self, v: &mut [f64], lambda: f64) {
        for (vi, ai) in v.iter_mut().zip(&self.diag) {
            *vi /= 1.0 + lambda / ai;
        }
    }

    /// Prox of the concave quadratic `-g`, componentwise
    /// `v_i / (1 - tau / a_i)`; requires `tau < min a_i`.
    pub fn stretch_mut(&self, v: &mut [f64], tau: f64) {
        debug_assert!(tau < self.min_diag());
        for (vi, ai) in v.iter_mut().zip(&self.diag) {
            *vi /= 1.0 - tau / ai;
        }
    }

    /// The convex conjugate with its gradient and prox in closed form.
    pub fn conjugate(&self) -> DiagQuadConjugate {
        DiagQuadConjugate {
            offset: self.offset,
            diag: self.diag.clone(),
        }
    }
}

/// Minimizer of `-g(x) + ||x - v||^2 / (2 tau)` for a diagonal-quadratic
/// `g`; errors when `tau >= min a_i` (the objective is then unbounded
/// below). A small strictness margin guards the singular boundary.
pub fn stretch_quadratic(v: &[f64], tau: f64, g: &DiagQuadratic) -> Result<Vec<f64>, OperatorError> {
    let min_diag = g.min_diag();
    if !(tau < min_diag * (1.0 - 1e-12)) {
        return Err(OperatorError::StretchStep { tau, min_diag });
    }
    let mut out = v.to_vec();
    g.stretch_mut(&mut out, tau);
    Ok(out)
}

/// The conjugate triple of a [`DiagQuadratic`]: for
/// `g(x) = c + (1/2) <A^{-1} x, x>`,
///
/// ```text
/// g*(p)            = -c + (1/2) <A p, p>
/// grad g*(p)       = A p
/// prox_{s g*}(v)_i = v_i / (1 + s a_i)
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct DiagQuadConjugate {
    offset: f64,
    diag: Vec<f64>,
}

impl DiagQuadConjugate {
    pub fn value(&self, p: &[f64]) -> f64 {
        -self.offset
            + 0.5
                * p.iter()
                    .zip(&self.diag)
                    .map(|(pi, ai)| ai * pi * pi)
                    .sum::<f64>()
    }

    pub fn grad(&self, p: &[f64], out: &mut [f64]) {
        for ((o, pi), ai) in out.iter_mut().zip(p).zip(&self.diag) {
            *o = ai * pi;
        }
    }

    pub fn prox_mut(&self, v: &mut [f64], sigma: f64) {
        for (vi, ai) in v.iter_mut().zip(&self.diag) {
            *vi /= 1.0 + sigma * ai;
        }
    }
}

pub fn diag_quad_conjugate(g: &DiagQuadratic) -> DiagQuadConjugate {
    g.conjugate()
}

/// Concave diagonal quadratic `h(y) = offset - (1/2) <B^{-1} y, y>` with
/// its concave conjugate `h_*(q) = inf_y { <y, q> - h(y) } = -offset -
/// (1/2) <B q, q>`. The games Hopf solver needs `-h_*(-q)`, which is the
/// convex quadratic `offset + (1/2) <B q, q>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcaveQuadratic {
    offset: f64,
    diag: Vec<f64>,
}

impl ConcaveQuadratic {
    pub fn new(offset: f64, diag: Vec<f64>) -> Self {
        assert!(
            diag.iter().all(|b| *b > 0.0),
            "ConcaveQuadratic weights must be positive"
        );
        ConcaveQuadratic { offset, diag }
    }

    pub fn value(&self, y: &[f64]) -> f64 {
        self.offset
            - 0.5
                * y.iter()
                    .zip(&self.diag)
                    .map(|(yi, bi)| yi * yi / bi)
                    .sum::<f64>()
    }

    pub fn grad(&self, y: &[f64], out: &mut [f64]) {
        for ((o, yi), bi) in out.iter_mut().zip(y).zip(&self.diag) {
            *o = -yi / bi;
        }
    }

    /// The concave conjugate `h_*(q)`.
    pub fn concave_conjugate_value(&self, q: &[f64]) -> f64 {
        -self.offset
            - 0.5
                * q.iter()
                    .zip(&self.diag)
                    .map(|(qi, bi)| bi * qi * qi)
                    .sum::<f64>()
    }

    /// `prox_{s f}(v)` for `f(q) = -h_*(-q)`, componentwise
    /// `v_i / (1 + s b_i)`.
    pub fn prox_neg_conjugate_mut(&self, v: &mut [f64], sigma: f64) {
        for (vi, bi) in v.iter_mut().zip(&self.diag) {
            *vi /= 1.0 + sigma * bi;
        }
    }
}

fn check_shape(b: &Bundle, scheme: Scheme, out: &Bundle) -> Result<(), OperatorError> {
    let expected_first = match scheme {
        Scheme::Lax => 0,
        Scheme::Hopf => 1,
    };
    if b.first_slot() != expected_first || !b.same_shape(out) {
        return Err(OperatorError::ShapeMismatch {
            expected_dim: out.dim(),
            expected_first,
            dim: b.dim(),
            first: b.first_slot(),
        });
    }
    Ok(())
}

/// Lax difference: `(D x)_0 = 0`, `(D x)_j = x_j - x_{j-1}` for `j >= 1`.
pub fn apply_d_lax_into(x: &Bundle, out: &mut Bundle) -> Result<(), OperatorError> {
    check_shape(x, Scheme::Lax, out)?;
    let (dim, last) = (x.dim(), x.last_slot());
    out.slot_mut(0).fill(0.0);
    for j in 1..=last {
        for i in 0..dim {
            out.slot_mut(j)[i] = x.slot(j)[i] - x.slot(j - 1)[i];
        }
    }
    Ok(())
}

/// Lax transpose: `(D^T p)_j = p_j - p_{j+1}` for `0 < j < N`,
/// `(D^T p)_N = p_N`, and `(D^T p)_0 = -p_1` (the zeroth row of `D` is
/// zero, so slot 0 of the input never contributes; under the solver's
/// `p_0 = 0` convention this coincides with `p_0 - p_1`).
pub fn apply_dt_lax_into(p: &Bundle, out: &mut Bundle) -> Result<(), OperatorError> {
    check_shape(p, Scheme::Lax, out)?;
    let (dim, last) = (p.dim(), p.last_slot());
    for i in 0..dim {
        out.slot_mut(0)[i] = -p.slot(1)[i];
    }
    for j in 1..last {
        for i in 0..dim {
            out.slot_mut(j)[i] = p.slot(j)[i] - p.slot(j + 1)[i];
        }
    }
    out.fill_slot(last, p.slot(last));
    Ok(())
}

/// Hopf difference: `(D p)_j = p_j - p_{j+1}` for `j < N`, `(D p)_N = p_N`
/// (slots `1..=N`).
pub fn apply_d_hopf_into(p: &Bundle, out: &mut Bundle) -> Result<(), OperatorError> {
    check_shape(p, Scheme::Hopf, out)?;
    let (dim, last) = (p.dim(), p.last_slot());
    for j in 1..last {
        for i in 0..dim {
            out.slot_mut(j)[i] = p.slot(j)[i] - p.slot(j + 1)[i];
        }
    }
    out.fill_slot(last, p.slot(last));
    Ok(())
}

/// Hopf transpose: `(D^T x)_1 = x_1`, `(D^T x)_j = x_j - x_{j-1}` for
/// `j >= 2` (backward difference with zero boundary).
pub fn apply_dt_hopf_into(x: &Bundle, out: &mut Bundle) -> Result<(), OperatorError> {
    check_shape(x, Scheme::Hopf, out)?;
    let (dim, last) = (x.dim(), x.last_slot());
    out.fill_slot(1, x.slot(1));
    for j in 2..=last {
        for i in 0..dim {
            out.slot_mut(j)[i] = x.slot(j)[i] - x.slot(j - 1)[i];
        }
    }
    Ok(())
}

pub fn apply_d_lax(x: &Bundle) -> Result<Bundle, OperatorError> {
    let mut out = Bundle::zeros_like(x);
    apply_d_lax_into(x, &mut out)?;
    Ok(out)
}

pub fn apply_dt_lax(p: &Bundle) -> Result<Bundle, OperatorError> {
    let mut out = Bundle::zeros_like(p);
    apply_dt_lax_into(p, &mut out)?;
    Ok(out)
}

pub fn apply_d_hopf(p: &Bundle) -> Result<Bundle, OperatorError> {
    let mut out = Bundle::zeros_like(p);
    apply_d_hopf_into(p, &mut out)?;
    Ok(out)
}

pub fn apply_dt_hopf(x: &Bundle) -> Result<Bundle, OperatorError> {
    let mut out = Bundle::zeros_like(x);
    apply_dt_hopf_into(x, &mut out)?;
    Ok(out)
}

/// Largest singular value of the difference operator for an `n_steps`
/// grid, by power iteration on `D^T D` (200 sweeps, tolerance 1e-10).
/// Diagnostic only: the step-size guard budgets against the static bound
/// 2, which this estimate approaches from below as `n_steps` grows.
pub fn estimate_d_norm(n_steps: usize, dim: usize, scheme: Scheme) -> f64 {
    assert!(n_steps >= 1 && dim >= 1);
    let first = match scheme {
        Scheme::Lax => 0,
        Scheme::Hopf => 1,
    };
    let n_slots = n_steps + 1 - first;
    let mut v = Bundle::zeros(dim, first, n_slots);
    for (k, x) in v.as_mut_slice().iter_mut().enumerate() {
        // deterministic non-degenerate start vector
        *x = 1.0 + (k as f64 + 1.0).recip();
    }
    let mut fwd = Bundle::zeros_like(&v);
    let mut back = Bundle::zeros_like(&v);
    let mut lambda = 0.0f64;
    for _ in 0..200 {
        match scheme {
            Scheme::Lax => {
                apply_d_lax_into(&v, &mut fwd).unwrap();
                apply_dt_lax_into(&fwd, &mut back).unwrap();
            }
            Scheme::Hopf => {
                apply_d_hopf_into(&v, &mut fwd).unwrap();
                apply_dt_hopf_into(&fwd, &mut back).unwrap();
            }
        }
        let norm = back.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let prev = lambda;
        lambda = norm
            / v.as_slice()
                .iter()
                .map(|x| x * x)
                .sum::<f64>()
                .sqrt();
        for (vi, bi) in v.as_mut_slice().iter_mut().zip(back.as_slice()) {
            *vi = bi / norm;
        }
        if (lambda - prev).abs() < 1e-10 * lambda.max(1.0) {
            break;
        }
    }
    lambda.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn shrink1_branches() {
        assert_eq!(shrink1(&[2.0], 0.5), vec![1.5]);
        assert_eq!(shrink1(&[0.3], 0.5), vec![0.0]);
        assert_eq!(shrink1(&[-2.0, 0.1], 0.5), vec![-1.5, 0.0]);
    }

    #[test]
    fn shrink2_cases() {
        assert_eq!(shrink2(&[0.0, 0.0], 1.0), vec![0.0, 0.0]);
        assert_eq!(shrink2(&[0.3, 0.4], 1.0), vec![0.0, 0.0]);
        let out = shrink2(&[3.0, 4.0], 1.0);
        assert!((out[0] - 2.4).abs() < 1e-12);
        assert!((out[1] - 3.2).abs() < 1e-12);
    }

    #[test]
    fn stretch_examples() {
        let g = DiagQuadratic::new(-0.5, vec![1.0]);
        assert_eq!(stretch_quadratic(&[0.0], 0.3, &g).unwrap(), vec![0.0]);
        let out = stretch_quadratic(&[1.0], 0.5, &g).unwrap();
        assert!((out[0] - 2.0).abs() < 1e-12);
        assert!(matches!(
            stretch_quadratic(&[1.0], 1.0, &g),
            Err(OperatorError::StretchStep { .. })
        ));
    }

    #[test]
    fn conjugate_closed_forms() {
        let g = DiagQuadratic::new(-0.5, vec![1.0, 1.0]);
        let conj = g.conjugate();
        assert!((conj.value(&[0.0, 0.0]) - 0.5).abs() < 1e-15);
        let mut v = vec![0.0, 0.0];
        conj.prox_mut(&mut v, 3.0);
        assert_eq!(v, vec![0.0, 0.0]);
        let mut v = vec![2.0];
        DiagQuadratic::new(0.0, vec![1.0]).conjugate().prox_mut(&mut v, 1.0);
        assert!((v[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn concave_conjugate_closed_form() {
        // h(y) = -y^2/2: h_*(q) = -q^2/2, so -h_*(-q) = q^2/2.
        let h = ConcaveQuadratic::new(0.0, vec![1.0]);
        assert!((h.concave_conjugate_value(&[2.0]) + 2.0).abs() < 1e-15);
        let mut v = vec![3.0];
        h.prox_neg_conjugate_mut(&mut v, 1.0);
        assert!((v[0] - 1.5).abs() < 1e-15);
    }

    fn bundle_from(vals: &[f64], first: usize) -> Bundle {
        let mut b = Bundle::zeros(1, first, vals.len());
        b.as_mut_slice().copy_from_slice(vals);
        b
    }

    #[test]
    fn d_lax_definition() {
        let x = bundle_from(&[1.0, 3.0, 6.0], 0);
        let d = apply_d_lax(&x).unwrap();
        assert_eq!(d.as_slice(), &[0.0, 2.0, 3.0]);
        let p = bundle_from(&[0.0, 1.0, 1.0], 0);
        let dt = apply_dt_lax(&p).unwrap();
        assert_eq!(dt.as_slice(), &[-1.0, 0.0, 1.0]);
    }

    #[test]
    fn d_hopf_definition() {
        let p = bundle_from(&[1.0, 1.0], 1);
        let d = apply_d_hopf(&p).unwrap();
        assert_eq!(d.as_slice(), &[0.0, 1.0]);
        // N = 1 degenerates to the identity.
        let p1 = bundle_from(&[4.0], 1);
        assert_eq!(apply_d_hopf(&p1).unwrap().as_slice(), &[4.0]);
        assert_eq!(apply_dt_hopf(&p1).unwrap().as_slice(), &[4.0]);
        let x = bundle_from(&[2.0, 5.0, 1.0], 1);
        let dt = apply_dt_hopf(&x).unwrap();
        assert_eq!(dt.as_slice(), &[2.0, 3.0, -4.0]);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let hopf = bundle_from(&[1.0, 2.0], 1);
        assert!(apply_d_lax(&hopf).is_err());
        let lax = bundle_from(&[1.0, 2.0], 0);
        assert!(apply_d_hopf(&lax).is_err());
    }

    fn random_bundle(rng: &mut crate::rng::Xoshiro256, dim: usize, first: usize, slots: usize) -> Bundle {
        let mut b = Bundle::zeros(dim, first, slots);
        for v in b.as_mut_slice() {
            *v = rng.next_symmetric(2.0);
        }
        b
    }

    #[test]
    fn adjoint_identity_lax_and_hopf() {
        let mut rng = crate::rng::Xoshiro256::seed_from(99);
        let norm = |b: &Bundle| b.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt();
        for _ in 0..20 {
            let x = random_bundle(&mut rng, 3, 0, 21);
            let p = random_bundle(&mut rng, 3, 0, 21);
            let dx = apply_d_lax(&x).unwrap();
            let lhs = p.dot(&dx);
            let rhs = apply_dt_lax(&p).unwrap().dot(&x);
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + norm(&p) * norm(&dx)));

            let xh = random_bundle(&mut rng, 3, 1, 20);
            let ph = random_bundle(&mut rng, 3, 1, 20);
            let dp = apply_d_hopf(&ph).unwrap();
            let lhs = dp.dot(&xh);
            let rhs = ph.dot(&apply_dt_hopf(&xh).unwrap());
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + norm(&dp) * norm(&xh)));
        }
    }

    #[test]
    fn d_norm_values() {
        // Lax N = 1 is [[0,0],[-1,1]] with norm sqrt(2); Hopf N = 1 is the identity.
        assert!((estimate_d_norm(1, 1, Scheme::Lax) - 2.0_f64.sqrt()).abs() < 1e-9);
        assert!((estimate_d_norm(1, 1, Scheme::Hopf) - 1.0).abs() < 1e-9);
        let n50 = estimate_d_norm(50, 1, Scheme::Lax);
        assert!((1.9..2.0).contains(&n50), "got {n50}");
        let h50 = estimate_d_norm(50, 1, Scheme::Hopf);
        assert!((1.9..2.0).contains(&h50), "got {h50}");
        // dim does not change the spectrum
        assert!((estimate_d_norm(7, 3, Scheme::Lax) - estimate_d_norm(7, 1, Scheme::Lax)).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn shrink_ops_nonexpansive(u in proptest::collection::vec(-5.0f64..5.0, 3),
                                   v in proptest::collection::vec(-5.0f64..5.0, 3),
                                   lambda in 0.0f64..3.0) {
            let d0: f64 = u.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum();
            for op in [shrink1, shrink2] {
                let pu = op(&u, lambda);
                let pv = op(&v, lambda);
                let d: f64 = pu.iter().zip(&pv).map(|(a, b)| (a - b) * (a - b)).sum();
                prop_assert!(d <= d0 * (1.0 + 1e-12) + 1e-15);
            }
        }

        #[test]
        fn shrink2_rotation_equivariant(x in -3.0f64..3.0, y in -3.0f64..3.0,
                                        angle in 0.0f64..std::f64::consts::TAU,
                                        lambda in 0.0f64..2.0) {
            let (s, c) = angle.sin_cos();
            let rot = |v: &[f64]| vec![c * v[0] - s * v[1], s * v[0] + c * v[1]];
            let lhs = shrink2(&rot(&[x, y]), lambda);
            let rhs = rot(&shrink2(&[x, y], lambda));
            prop_assert!((lhs[0] - rhs[0]).abs() < 1e-12);
            prop_assert!((lhs[1] - rhs[1]).abs() < 1e-12);
        }
    }
}
