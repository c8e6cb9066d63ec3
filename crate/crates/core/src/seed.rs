//! Hierarchical deterministic seeding.
//!
//! Every random draw in the crate comes from a [`RunSeed`]: a master seed plus a
//! replication index. Child seeds are derived by hashing, so a configuration,
//! an ensemble member or a single replication always receives the same stream
//! no matter how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunSeed {
    pub master: u64,
    pub index: u64,
}

impl RunSeed {
    pub fn new(master: u64) -> Self {
        RunSeed { master, index: 0 }
    }

    /// Same master, different replication index.
    pub fn replication(self, index: u64) -> Self {
        RunSeed { master: self.master, index }
    }

    /// Independent seed for a named sub-task.
    pub fn child(self, tag: u64) -> Self {
        let mixed = splitmix64(
            splitmix64(self.master ^ splitmix64(self.index)) ^ splitmix64(tag.wrapping_add(0xA076_1D64_78BD_642F)),
        );
        RunSeed { master: mixed, index: 0 }
    }

    /// Child seed keyed by several integers.
    pub fn child_of(self, tags: &[u64]) -> Self {
        tags.iter().fold(self, |s, &t| s.child(t))
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.index);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
