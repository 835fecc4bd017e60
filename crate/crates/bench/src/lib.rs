//! Shared fixtures for the benchmarks.

use orthosim::protocol::{ProtocolConfig, Variant};
use orthosim::qlinalg::BasisSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Bell-basis configuration with `copies` blocks.
pub fn bell_config(variant: Variant, copies: usize) -> ProtocolConfig {
    ProtocolConfig::new(variant, BasisSet::bell(), copies).expect("Bell basis is valid")
}
