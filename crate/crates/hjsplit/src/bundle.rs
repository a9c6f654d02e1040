//! Time-indexed iterate bundles and their random initialization.

use crate::config::PdhgConfig;
use crate::rng::Xoshiro256;
use crate::time_grid::{Scheme, TimeGrid};

/// A sequence of `dim`-vectors indexed by time slot.
///
/// Lax-shaped bundles hold slots `0..=N`, Hopf-shaped bundles `1..=N`;
/// storage is one contiguous row-major buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    dim: usize,
    first: usize,
    data: Vec<f64>,
}

impl Bundle {
    pub fn zeros(dim: usize, first: usize, n_slots: usize) -> Self {
        Bundle {
            dim,
            first,
            data: vec![0.0; dim * n_slots],
        }
    }

    pub fn zeros_like(other: &Bundle) -> Self {
        Bundle::zeros(other.dim, other.first, other.n_slots())
    }

    /// A zero bundle shaped for `grid`.
    pub fn for_grid(dim: usize, grid: &TimeGrid) -> Self {
        Bundle::zeros(dim, grid.first_slot(), grid.n_slots())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn first_slot(&self) -> usize {
        self.first
    }

    pub fn last_slot(&self) -> usize {
        self.first + self.n_slots() - 1
    }

    pub fn n_slots(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn slot(&self, j: usize) -> &[f64] {
        let k = (j - self.first) * self.dim;
        &self.data[k..k + self.dim]
    }

    pub fn slot_mut(&mut self, j: usize) -> &mut [f64] {
        let k = (j - self.first) * self.dim;
        &mut self.data[k..k + self.dim]
    }

    pub fn fill_slot(&mut self, j: usize, v: &[f64]) {
        self.slot_mut(j).copy_from_slice(v);
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Squared Euclidean distance to another bundle of the same shape.
    pub fn sq_dist(&self, other: &Bundle) -> f64 {
        debug_assert_eq!(self.data.len(), other.data.len());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn max_abs_diff(&self, other: &Bundle) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Flat inner product with another bundle of the same shape.
    pub fn dot(&self, other: &Bundle) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub(crate) fn same_shape(&self, other: &Bundle) -> bool {
        self.dim == other.dim && self.first == other.first && self.data.len() == other.data.len()
    }
}

/// The iterates of one solve: states `x`, costates `p`, the relaxed iterate
/// `z`, and for games the second-player triple `(y, q, w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryBundle {
    pub x: Bundle,
    pub p: Bundle,
    pub z: Bundle,
    pub y: Option<Bundle>,
    pub q: Option<Bundle>,
    pub w: Option<Bundle>,
}

impl TrajectoryBundle {
    pub fn is_game(&self) -> bool {
        self.y.is_some()
    }
}

fn fill_random(
    bundle: &mut Bundle,
    center: Option<&[f64]>,
    radius: f64,
    skip: &[usize],
    rng: &mut Xoshiro256,
) {
    let (first, last) = (bundle.first_slot(), bundle.last_slot());
    for j in first..=last {
        if skip.contains(&j) {
            continue;
        }
        let slot = bundle.slot_mut(j);
        for (i, v) in slot.iter_mut().enumerate() {
            let c = center.map_or(0.0, |c| c[i]);
            *v = c + rng.next_symmetric(radius);
        }
    }
}

/// Random initialization for an optimal-control solve.
///
/// Every state slot except the pinned terminal one is drawn uniformly
/// within `init_radius` of the target in the infinity norm; costates are
/// drawn within `init_radius` of the origin (the Lax accounting slot `p_0`
/// stays zero and is never updated). `z` starts equal to `x`. The draw is
/// a pure function of `(dim, target, cfg.seed, cfg.init_radius, grid)`.
pub fn random_init(dim: usize, target: &[f64], cfg: &PdhgConfig, grid: &TimeGrid) -> TrajectoryBundle {
    let mut rng = Xoshiro256::seed_from(cfg.seed);
    let n = grid.n_steps();
    let mut x = Bundle::for_grid(dim, grid);
    x.fill_slot(n, target);
    fill_random(&mut x, Some(target), cfg.init_radius, &[n], &mut rng);
    let mut p = Bundle::for_grid(dim, grid);
    let p_skip: &[usize] = match grid.scheme() {
        Scheme::Lax => &[0],
        Scheme::Hopf => &[],
    };
    fill_random(&mut p, None, cfg.init_radius, p_skip, &mut rng);
    let z = x.clone();
    TrajectoryBundle {
        x,
        p,
        z,
        y: None,
        q: None,
        w: None,
    }
}

/// Random initialization for a differential-games solve; draw order is
/// `x, y, p, q` so the stream is reproducible.
pub fn random_init_game(
    dim_x: usize,
    dim_y: usize,
    target_x: &[f64],
    target_y: &[f64],
    cfg: &PdhgConfig,
    grid: &TimeGrid,
) -> TrajectoryBundle {
    let mut rng = Xoshiro256::seed_from(cfg.seed);
    let n = grid.n_steps();
    let dual_skip: &[usize] = match grid.scheme() {
        Scheme::Lax => &[0],
        Scheme::Hopf => &[],
    };

    let mut x = Bundle::for_grid(dim_x, grid);
    x.fill_slot(n, target_x);
    fill_random(&mut x, Some(target_x), cfg.init_radius, &[n], &mut rng);
    let mut y = Bundle::for_grid(dim_y, grid);
    y.fill_slot(n, target_y);
    fill_random(&mut y, Some(target_y), cfg.init_radius, &[n], &mut rng);
    let mut p = Bundle::for_grid(dim_x, grid);
    fill_random(&mut p, None, cfg.init_radius, dual_skip, &mut rng);
    let mut q = Bundle::for_grid(dim_y, grid);
    fill_random(&mut q, None, cfg.init_radius, dual_skip, &mut rng);

    let z = x.clone();
    let w = y.clone();
    TrajectoryBundle {
        x,
        p,
        z,
        y: Some(y),
        q: Some(q),
        w: Some(w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time_grid::{Scheme, TimeGrid};

    fn cfg(seed: u64, radius: f64) -> PdhgConfig {
        let mut c = PdhgConfig::with_sigma(50.0, 0.02).unwrap();
        c.seed = seed;
        c.init_radius = radius;
        c
    }

    #[test]
    fn init_respects_radius_and_pins_target() {
        let grid = TimeGrid::new(0.2, 0.02, Scheme::Lax).unwrap();
        let target = [0.0, 0.0];
        let b = random_init(2, &target, &cfg(7, 0.1), &grid);
        for j in 0..=grid.n_steps() {
            for (i, v) in b.x.slot(j).iter().enumerate() {
                assert!((v - target[i]).abs() <= 0.1 + 1e-15);
            }
            for v in b.p.slot(j) {
                assert!(v.abs() <= 0.1 + 1e-15);
            }
        }
        assert_eq!(b.x.slot(grid.n_steps()), &target);
        assert_eq!(b.p.slot(0), &[0.0, 0.0]);
        assert_eq!(b.z, b.x);
    }

    #[test]
    fn zero_radius_is_constant_at_target() {
        let grid = TimeGrid::new(0.1, 0.02, Scheme::Lax).unwrap();
        let target = [1.5, -0.5];
        let b = random_init(2, &target, &cfg(3, 0.0), &grid);
        for j in 0..=grid.n_steps() {
            assert_eq!(b.x.slot(j), &target);
            assert_eq!(b.p.slot(j), &[0.0, 0.0]);
        }
    }

    #[test]
    fn same_seed_bitwise_identical() {
        let grid = TimeGrid::new(0.2, 0.02, Scheme::Hopf).unwrap();
        let a = random_init(3, &[0.3, -0.2, 1.0], &cfg(11, 0.1), &grid);
        let b = random_init(3, &[0.3, -0.2, 1.0], &cfg(11, 0.1), &grid);
        assert_eq!(a, b);
    }

    #[test]
    fn game_init_pins_both_targets() {
        let grid = TimeGrid::new(0.1, 0.02, Scheme::Lax).unwrap();
        let b = random_init_game(1, 1, &[0.5], &[-0.5], &cfg(5, 0.1), &grid);
        let n = grid.n_steps();
        assert_eq!(b.x.slot(n), &[0.5]);
        assert_eq!(b.y.as_ref().unwrap().slot(n), &[-0.5]);
        assert_eq!(b.p.slot(0), &[0.0]);
        assert_eq!(b.q.as_ref().unwrap().slot(0), &[0.0]);
        assert_eq!(b.w.as_ref().unwrap(), b.y.as_ref().unwrap());
    }

    #[test]
    fn hopf_bundle_has_no_zero_slot() {
        let grid = TimeGrid::new(0.1, 0.02, Scheme::Hopf).unwrap();
        let b = random_init(2, &[0.0, 0.0], &cfg(1, 0.1), &grid);
        assert_eq!(b.x.first_slot(), 1);
        assert_eq!(b.x.n_slots(), 5);
    }
}
