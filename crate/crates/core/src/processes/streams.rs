//! Named, reproducible RNG streams.
//!
//! Every window draws from its own stream derived from (master seed, window
//! index); mixture selection draws from a separate stream. This keeps window
//! sampling independent of thread count and keeps the selector independent of
//! all path randomness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const WINDOW_DOMAIN: u64 = 0x57494e444f575f54; // "WINDOW_T"
const SELECTOR_DOMAIN: u64 = 0x53454c4543544f52; // "SELECTOR"

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn derive(master: u64, domain: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ domain).wrapping_add(index))
}

/// Stream feeding all path randomness of window `index`.
pub fn window_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master_seed, WINDOW_DOMAIN, index))
}

/// Stream feeding mixture-component selection, disjoint from window streams.
pub fn selector_rng(master_seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master_seed, SELECTOR_DOMAIN, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = window_rng(42, 7);
        let mut b = window_rng(42, 7);
        let mut c = window_rng(42, 8);
        let mut s = selector_rng(42);
        let (xa, xb, xc, xs): (u64, u64, u64, u64) =
            (a.random(), b.random(), c.random(), s.random());
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
        assert_ne!(xa, xs);
    }
}
