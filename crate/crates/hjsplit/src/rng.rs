//! Seedable, portable random numbers for iterate initialization.
//!
//! Solves must be bit-reproducible from a `u64` seed on every platform, so
//! we carry a self-contained xoshiro256++ generator (public-domain
//! reference constants) seeded through SplitMix64 instead of going through
//! a generator whose stream is allowed to change across library versions.

/// One SplitMix64 step. Also used as the mixing function when deriving
/// per-point and per-restart seeds.
#[inline]
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derives a stream seed from a base seed and a list of indices
/// (grid node, time index, restart counter, ...). Order-sensitive.
pub fn derive_seed(base: u64, indices: &[u64]) -> u64 {
    let mut s = base;
    let mut out = splitmix64(&mut s);
    for &ix in indices {
        s ^= ix.wrapping_mul(0x9e3779b97f4a7c15);
        out = splitmix64(&mut s);
    }
    out
}

/// xoshiro256++ with the reference update rule.
#[derive(Clone, Debug)]
pub struct Xoshiro256 {
    s: [u64; 4],
}

impl Xoshiro256 {
    /// Seeds the four state words through SplitMix64, as recommended by the
    /// generator's authors.
    pub fn seed_from(seed: u64) -> Self {
        let mut sm = seed;
        let s = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        Xoshiro256 { s }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0]
            .wrapping_add(s[3])
            .rotate_left(23)
            .wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)` using the top 53 bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-r, r]`.
    #[inline]
    pub fn next_symmetric(&mut self, r: f64) -> f64 {
        r * (2.0 * self.next_f64() - 1.0)
    }
}
