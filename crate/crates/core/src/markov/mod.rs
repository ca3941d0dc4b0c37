//! The σ-bounded Markov model.
//!
//! States are the number of bits set in the (active) array, `0..=σ`. One
//! transition is one new message. [`TransitionTable`] holds the one-step
//! probabilities, [`SteadyState`] the stationary distribution, and the
//! functions in this module turn them into long-run false-positive rates and
//! expected cycle lengths.

use core::fmt;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::params::{HashVariant, Retention};

mod capacity;
mod rates;
mod steady;
mod table;

pub use capacity::{expected_capacity, expected_capacity_profile, CapacityConvention};
pub use rates::{
    closed_form_k1, fp_profile, frozen_distribution, one_phase_fp, per_state_fp, two_phase_fp,
    FrozenDistribution,
};
pub use steady::{steady_state, SteadyState};
pub use table::{insertion_distribution, TransitionTable};

/// Hashing × retention combination of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "kebab-case"))]
pub enum ModelVariant {
    CollidingNonRetaining,
    CollidingRetaining,
    NonCollidingNonRetaining,
    NonCollidingRetaining,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 4] = [
        ModelVariant::CollidingNonRetaining,
        ModelVariant::CollidingRetaining,
        ModelVariant::NonCollidingNonRetaining,
        ModelVariant::NonCollidingRetaining,
    ];

    pub fn new(hash: HashVariant, retention: Retention) -> Self {
        match (hash, retention) {
            (HashVariant::Colliding, Retention::NonRetaining) => ModelVariant::CollidingNonRetaining,
            (HashVariant::Colliding, Retention::Retaining) => ModelVariant::CollidingRetaining,
            (HashVariant::NonColliding, Retention::NonRetaining) => {
                ModelVariant::NonCollidingNonRetaining
            }
            (HashVariant::NonColliding, Retention::Retaining) => ModelVariant::NonCollidingRetaining,
        }
    }

    pub fn hash_variant(self) -> HashVariant {
        match self {
            ModelVariant::CollidingNonRetaining | ModelVariant::CollidingRetaining => {
                HashVariant::Colliding
            }
            _ => HashVariant::NonColliding,
        }
    }

    pub fn retention(self) -> Retention {
        if self.retains() {
            Retention::Retaining
        } else {
            Retention::NonRetaining
        }
    }

    pub fn retains(self) -> bool {
        matches!(
            self,
            ModelVariant::CollidingRetaining | ModelVariant::NonCollidingRetaining
        )
    }

    /// Two-letter tag: `cn`, `cr`, `nn`, `nr`.
    pub fn tag(self) -> &'static str {
        match self {
            ModelVariant::CollidingNonRetaining => "cn",
            ModelVariant::CollidingRetaining => "cr",
            ModelVariant::NonCollidingNonRetaining => "nn",
            ModelVariant::NonCollidingRetaining => "nr",
        }
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A solved σ-bounded model: table plus steady state.
#[derive(Debug, Clone)]
pub struct SigmaModel {
    pub table: TransitionTable,
    pub steady: SteadyState,
}

impl SigmaModel {
    pub fn solve(variant: ModelVariant, bits: usize, hashes: usize, sigma: usize) -> Result<Self> {
        let table = TransitionTable::build(variant, bits, hashes, sigma)?;
        let steady = steady_state(&table)?;
        Ok(SigmaModel { table, steady })
    }

    /// Long-run average false-positive rate of a one-phase filter.
    pub fn one_phase_fp(&self) -> f64 {
        one_phase_fp(&self.steady)
    }

    /// Long-run average false-positive rate when this model describes each
    /// array of a two-phase filter. Needs a non-retaining variant.
    pub fn two_phase_fp(&self) -> Result<f64> {
        let frozen = frozen_distribution(&self.steady, &self.table)?;
        Ok(two_phase_fp(&self.steady, &frozen))
    }

    /// Expected new messages per cycle.
    pub fn expected_capacity(&self, convention: CapacityConvention) -> Result<f64> {
        expected_capacity(&self.table, convention)
    }
}
