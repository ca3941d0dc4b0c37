//! Ideal hashing.
//!
//! Each message gets its own ChaCha8 stream, keyed by a global seed and
//! selected by the message id. The `k` indices are drawn from that stream, so
//! they are independent across messages, uniform over the array, and
//! identical every time the same message is hashed again.

use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::params::{FilterParams, HashVariant};

/// Opaque 64-bit message identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(transparent))]
pub struct MessageId(pub u64);

/// The bit indices one message maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashAssignment {
    pub message: MessageId,
    /// `k` indices in `[0, bits)`. Distinct for non-colliding hashing; may
    /// repeat for colliding hashing.
    pub indices: Vec<usize>,
}

impl HashAssignment {
    /// Number of distinct bits this assignment touches.
    pub fn distinct(&self) -> usize {
        let mut sorted = self.indices.clone();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.len()
    }
}

/// Seeded source of ideal hash assignments for one filter geometry.
#[derive(Debug, Clone)]
pub struct IdealHasher {
    key: <ChaCha8Rng as SeedableRng>::Seed,
    bits: usize,
    hashes: usize,
    variant: HashVariant,
}

impl IdealHasher {
    /// Hasher over the per-array range of `params` (`floor(M/2)` for two
    /// phases, so both arrays share the same `k` hash functions).
    pub fn new(params: &FilterParams, seed: u64) -> Self {
        Self::with_geometry(params.array_bits(), params.hashes, params.hash_variant, seed)
    }

    pub fn with_geometry(bits: usize, hashes: usize, variant: HashVariant, seed: u64) -> Self {
        assert!(bits >= 1 && hashes >= 1, "hash range and count must be positive");
        if variant == HashVariant::NonColliding {
            assert!(hashes <= bits, "non-colliding hashing needs k <= M");
        }
        IdealHasher {
            key: ChaCha8Rng::seed_from_u64(seed).get_seed(),
            bits,
            hashes,
            variant,
        }
    }

    pub fn assign(&self, message: MessageId) -> HashAssignment {
        let mut indices = Vec::with_capacity(self.hashes);
        self.assign_into(message, &mut indices);
        HashAssignment { message, indices }
    }

    /// Like [`assign`](Self::assign) but reuses `out`.
    pub fn assign_into(&self, message: MessageId, out: &mut Vec<usize>) {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(message.0);
        out.clear();
        match self.variant {
            HashVariant::Colliding => {
                out.extend((0..self.hashes).map(|_| rng.gen_range(0..self.bits)));
            }
            HashVariant::NonColliding => {
                out.extend(index::sample(&mut rng, self.bits, self.hashes).iter());
            }
        }
    }
}

/// One-shot form of [`IdealHasher::assign`].
pub fn hash_indices(message: MessageId, params: &FilterParams, seed: u64) -> HashAssignment {
    IdealHasher::new(params, seed).assign(message)
}
