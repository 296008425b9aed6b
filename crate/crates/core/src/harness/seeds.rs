//! Seed derivation for experiment cells.
//!
//! A cell seed is built by folding the base seed, an FNV-1a hash of the strategy
//! label, the bit pattern of the budget and the replication index through the
//! SplitMix64 finalizer:
//!
//! ```text
//! h0 = splitmix64(base)
//! h1 = splitmix64(h0 ^ fnv1a64(label))
//! h2 = splitmix64(h1 ^ budget.to_bits())
//! seed = splitmix64(h2 ^ replication)
//! ```
//!
//! Adding or removing strategies therefore leaves every other cell's seed unchanged.

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

pub fn cell_seed(base: u64, strategy: &str, budget: f64, replication: usize) -> u64 {
    let h = splitmix64(base);
    let h = splitmix64(h ^ fnv1a64(strategy.as_bytes()));
    let h = splitmix64(h ^ budget.to_bits());
    splitmix64(h ^ replication as u64)
}
