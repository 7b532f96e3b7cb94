//! Deterministic child seeds for independent Monte Carlo tasks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default master seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x0000_0E5C_1957_2017_u64;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Incremental builder for a child seed. Each absorbed field is length
/// delimited, so `("ab", "c")` and `("a", "bc")` produce different seeds.
#[derive(Debug, Clone)]
pub struct SeedBuilder {
    state: u64,
}

impl SeedBuilder {
    pub fn new(master: u64) -> Self {
        let mut b = Self { state: FNV_OFFSET };
        b.absorb_bytes(&master.to_le_bytes());
        b
    }

    fn absorb_bytes(&mut self, bytes: &[u8]) {
        for &byte in bytes {
            self.state ^= u64::from(byte);
            self.state = self.state.wrapping_mul(FNV_PRIME);
        }
    }

    pub fn str(mut self, s: &str) -> Self {
        self.absorb_bytes(&(s.len() as u64).to_le_bytes());
        self.absorb_bytes(s.as_bytes());
        self
    }

    pub fn u64(mut self, v: u64) -> Self {
        self.absorb_bytes(&v.to_le_bytes());
        self
    }

    pub fn finish(self) -> u64 {
        splitmix64(self.state)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
