//! The positive bump speed field shared by the Eikonal and game problems.

/// `c(x) = scale * (base + amplitude * exp(-sharpness * ||x - center||^2))`.
///
/// Positive everywhere for `base > 0`, `amplitude >= 0`, which the
/// constructor enforces.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpSpeed {
    pub base: f64,
    pub amplitude: f64,
    pub sharpness: f64,
    pub center: Vec<f64>,
    pub scale: f64,
}

impl BumpSpeed {
    pub fn new(base: f64, amplitude: f64, sharpness: f64, center: Vec<f64>, scale: f64) -> Self {
        assert!(base > 0.0 && amplitude >= 0.0 && scale > 0.0);
        BumpSpeed {
            base,
            amplitude,
            sharpness,
            center,
            scale,
        }
    }

    /// The field used by the Eikonal and difference-of-norms runs:
    /// `1 + 3 exp(-4 ||x - (1,1,0,..)||^2)`.
    pub fn benchmark(dim: usize) -> Self {
        BumpSpeed::new(1.0, 3.0, 4.0, Self::benchmark_center(dim), 1.0)
    }

    /// The doubled field of the Isaacs example.
    pub fn benchmark_doubled(dim: usize) -> Self {
        BumpSpeed::new(1.0, 3.0, 4.0, Self::benchmark_center(dim), 2.0)
    }

    fn benchmark_center(dim: usize) -> Vec<f64> {
        let mut center = vec![0.0; dim];
        if dim >= 1 {
            center[0] = 1.0;
        }
        if dim >= 2 {
            center[1] = 1.0;
        }
        center
    }

    /// Largest value the field attains, used for dissipation bounds.
    pub fn max_value(&self) -> f64 {
        self.scale * (self.base + self.amplitude)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let sq: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(xi, ci)| (xi - ci) * (xi - ci))
            .sum();
        self.scale * (self.base + self.amplitude * (-self.sharpness * sq).exp())
    }

    pub fn grad(&self, x: &[f64], out: &mut [f64]) {
        let sq: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(xi, ci)| (xi - ci) * (xi - ci))
            .sum();
        let factor = -2.0 * self.sharpness * self.scale * self.amplitude * (-self.sharpness * sq).exp();
        for ((o, xi), ci) in out.iter_mut().zip(x).zip(&self.center) {
            *o = factor * (xi - ci);
        }
    }

    /// `c(x - s * drift)` for the time-dependent variant.
    pub fn value_shifted(&self, x: &[f64], s: f64, drift: &[f64]) -> f64 {
        let sq: f64 = x
            .iter()
            .zip(&self.center)
            .zip(drift)
            .map(|((xi, ci), di)| {
                let v = xi - s * di - ci;
                v * v
            })
            .sum();
        self.scale * (self.base + self.amplitude * (-self.sharpness * sq).exp())
    }

    pub fn grad_shifted(&self, x: &[f64], s: f64, drift: &[f64], out: &mut [f64]) {
        let sq: f64 = x
            .iter()
            .zip(&self.center)
            .zip(drift)
            .map(|((xi, ci), di)| {
                let v = xi - s * di - ci;
                v * v
            })
            .sum();
        let factor = -2.0 * self.sharpness * self.scale * self.amplitude * (-self.sharpness * sq).exp();
        for (((o, xi), ci), di) in out.iter_mut().zip(x).zip(&self.center).zip(drift) {
            *o = factor * (xi - s * di - ci);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_value_at_center() {
        let c = BumpSpeed::benchmark(2);
        assert!((c.value(&[1.0, 1.0]) - 4.0).abs() < 1e-15);
        assert!((c.max_value() - 4.0).abs() < 1e-15);
        let c2 = BumpSpeed::benchmark_doubled(2);
        assert!((c2.value(&[1.0, 1.0]) - 8.0).abs() < 1e-15);
    }

    #[test]
    fn gradient_vanishes_at_center_and_matches_fd() {
        let c = BumpSpeed::benchmark(3);
        let mut g = vec![0.0; 3];
        c.grad(&[1.0, 1.0, 0.0], &mut g);
        assert!(g.iter().all(|v| v.abs() < 1e-15));

        let x = [0.3, -0.7, 0.2];
        c.grad(&x, &mut g);
        let h = 1e-6;
        for i in 0..3 {
            let mut up = x;
            up[i] += h;
            let mut dn = x;
            dn[i] -= h;
            let fd = (c.value(&up) - c.value(&dn)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn shifted_field_translates() {
        let c = BumpSpeed::benchmark(2);
        let drift = [-1.0, 1.0];
        let s = 0.4;
        let x = [0.2, 0.9];
        let moved = [x[0] + s * drift[0], x[1] + s * drift[1]];
        assert!((c.value_shifted(&moved, s, &drift) - c.value(&x)).abs() < 1e-14);
    }
}
