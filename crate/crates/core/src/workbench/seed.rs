//! Hierarchical seeds: every stage and trial derives its own generator from
//! the run seed, so adding trials never changes earlier ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stage labels.
pub mod stage {
    pub const PIPELINE: u64 = 1;
    pub const PARAM: u64 = 2;
    pub const SELFTEST: u64 = 3;
    pub const FRAME: u64 = 10;
    pub const FORM: u64 = 11;
    pub const BASE_POINT: u64 = 12;
    pub const SEARCH: u64 = 13;
    pub const TAU: u64 = 14;
    pub const CERT: u64 = 15;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedTree {
    seed: u64,
}

impl SeedTree {
    pub fn new(seed: u64) -> Self {
        SeedTree { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn child(&self, label: u64) -> SeedTree {
        SeedTree { seed: splitmix64(self.seed ^ splitmix64(label.wrapping_add(0x5851_f42d_4c95_7f2d))) }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}
