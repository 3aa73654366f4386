// SPDX-License-Identifier: Apache-2.0

//! Seeded, independently addressable random streams.
//!
//! Every stochastic routine takes an explicit [`Rng`]. Parallel work obtains
//! its generator from [`stream`] with a purpose tag and an index, so results
//! never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Purpose tags keep sub-streams of different consumers disjoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    General = 0,
    MonteCarloBatch = 1,
    Trial = 2,
    Evolution = 3,
    Shock = 4,
    Verify = 5,
}

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for sub-stream `index` of `purpose` under `seed`.
pub fn stream(seed: u64, purpose: Purpose, index: u64) -> Rng {
    debug_assert!(index < 1 << 40);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 40) | index);
    rng
}
