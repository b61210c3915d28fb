//! Keyed, counter-based random streams.
//!
//! A stream is addressed by the master seed plus a short key (a purpose tag
//! followed by indices). Values are pure functions of that address, so the
//! order in which pairs or replicas are visited, and the number of worker
//! threads, never changes the output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const MAX_KEY: usize = 4;

/// SplitMix64 finaliser.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Maps 64 random bits to a double in [0, 1).
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Weight = 1,
    Edge = 2,
    SparseEdge = 3,
    Couple = 4,
    Walk = 5,
    Start = 6,
    Scan = 7,
    Audit = 8,
    LinkTail = 9,
    Lanczos = 10,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngStream {
    master_seed: u64,
    key: [u64; MAX_KEY],
    len: usize,
    state: u64,
}

impl RngStream {
    pub fn new(master_seed: u64) -> Self {
        RngStream { master_seed, key: [0; MAX_KEY], len: 0, state: mix64(master_seed ^ GOLDEN) }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_key(&self) -> &[u64] {
        &self.key[..self.len.min(MAX_KEY)]
    }

    #[inline]
    fn absorb(&self, v: u64) -> Self {
        let mut next = *self;
        if next.len < MAX_KEY {
            next.key[next.len] = v;
        }
        next.len += 1;
        next.state = mix64(self.state.wrapping_add(GOLDEN) ^ mix64(v.wrapping_add(next.len as u64)));
        next
    }

    pub fn purpose(&self, p: Purpose) -> Self {
        self.absorb(p as u64)
    }

    #[inline]
    pub fn index(&self, i: u64) -> Self {
        self.absorb(i)
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        mix64(self.state ^ 0xD1B5_4A32_D192_ED03)
    }

    #[inline]
    pub fn uniform(&self) -> f64 {
        unit_f64(self.bits())
    }

    /// The `counter`-th value of the SplitMix sequence rooted at this key.
    #[inline]
    pub fn bits_at(&self, counter: u64) -> u64 {
        mix64(self.state.wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN)))
    }

    #[inline]
    pub fn uniform_at(&self, counter: u64) -> f64 {
        unit_f64(self.bits_at(counter))
    }

    /// A sequential generator for long serial consumers such as walkers.
    pub fn sequential(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.bits())
    }
}

/// Uniform for the unordered pair {x, y}, keyed by (seed, Edge, min, max).
#[inline]
pub fn pair_uniform(edge_stream: &RngStream, x: u64, y: u64) -> f64 {
    let (a, b) = if x < y { (x, y) } else { (y, x) };
    edge_stream.index(a).index(b).uniform()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_order_matters() {
        let s = RngStream::new(7).purpose(Purpose::Edge);
        assert_ne!(s.index(1).index(2).bits(), s.index(2).index(1).bits());
        assert_eq!(pair_uniform(&s, 1, 2), pair_uniform(&s, 2, 1));
    }

    #[test]
    fn streams_are_reproducible() {
        let a = RngStream::new(42).purpose(Purpose::Weight).index(3);
        let b = RngStream::new(42).purpose(Purpose::Weight).index(3);
        assert_eq!(a.uniform(), b.uniform());
        assert_eq!(a.stream_key(), &[1, 3]);
        assert_ne!(a.uniform(), RngStream::new(43).purpose(Purpose::Weight).index(3).uniform());
    }

    #[test]
    fn uniforms_look_uniform() {
        let s = RngStream::new(1).purpose(Purpose::Audit);
        let n = 200_000;
        let mut bins = [0usize; 10];
        let mut mean = 0.0;
        for i in 0..n {
            let u = s.uniform_at(i);
            assert!((0.0..1.0).contains(&u));
            bins[(u * 10.0) as usize] += 1;
            mean += u;
        }
        mean /= n as f64;
        assert!((mean - 0.5).abs() < 0.005);
        let expected = n as f64 / 10.0;
        let chi2: f64 = bins.iter().map(|&b| (b as f64 - expected).powi(2) / expected).sum();
        // 9 degrees of freedom, 0.999 quantile is about 27.9
        assert!(chi2 < 27.9, "chi2 = {chi2}");
    }
}
