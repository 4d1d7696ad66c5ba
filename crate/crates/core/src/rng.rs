//! Seeded randomness. ChaCha is used everywhere so streams are identical
//! across platforms and releases of `rand`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable 64-bit seed for one replicate of one grid cell: FNV-1a over the
/// canonical key, folded with the master seed and replicate index.
pub fn derive_seed(master_seed: u64, cell_key: &str, replicate: usize) -> u64 {
    const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = FNV_OFFSET;
    for b in cell_key.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    mix64(mix64(master_seed ^ h).wrapping_add(replicate as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn derive_seed_is_stable() {
        let a = derive_seed(42, "n=100;mu=0.1", 0);
        assert_eq!(a, derive_seed(42, "n=100;mu=0.1", 0));
        assert_ne!(a, derive_seed(42, "n=100;mu=0.1", 1));
        assert_ne!(a, derive_seed(43, "n=100;mu=0.1", 0));
        assert_ne!(a, derive_seed(42, "n=100;mu=0.2", 0));
    }

    #[test]
    fn stream_is_pinned() {
        // guards against silent changes in the generator
        let mut r = seeded(7);
        let first = r.next_u64();
        assert_eq!(first, 2910824217569608635);
    }

    #[test]
    fn mix64_matches_splitmix_reference() {
        // first outputs of the reference SplitMix64 stream seeded with 0
        assert_eq!(mix64(0), 0xe220_a839_7b1d_cdaf);
        assert_eq!(mix64(0x9e37_79b9_7f4a_7c15), 0x6e78_9e6a_a1b9_65f4);
    }
}
