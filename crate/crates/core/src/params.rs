use crate::error::{ensure, Result};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Whether the `k` hashes of one message may land on the same bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "kebab-case"))]
pub enum HashVariant {
    /// Sampling with replacement.
    Colliding,
    /// Sampling without replacement: `k` distinct bits.
    NonColliding,
}

/// What happens to the message whose insertion triggers a recycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "kebab-case"))]
pub enum Retention {
    /// Re-insert it as the first message of the new cycle.
    Retaining,
    /// Drop it; the next arrival starts the new cycle.
    NonRetaining,
}

/// When the filter recycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(rename_all = "kebab-case", tag = "kind")
)]
pub enum RecyclePolicy {
    /// Recycle as soon as more than `sigma` bits are set.
    SigmaBounded { sigma: usize },
    /// Recycle after the `limit`-th counted insertion of a cycle.
    ///
    /// A real user only counts insertions that set at least one bit. With
    /// `oracle` set every new message is counted, including false positives.
    NBounded {
        limit: u64,
        #[cfg_attr(feature = "serde", serde(default))]
        oracle: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "kebab-case"))]
pub enum Phases {
    One,
    /// Two half-size arrays, one active and one frozen.
    Two,
}

/// How a two-phase filter treats a message found in the frozen array only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "kebab-case"))]
pub enum TwoPhaseInsert {
    /// A positive combined query means "repeat": nothing is set.
    #[default]
    OnCombinedMiss,
    /// Always set the message's bits in the active array.
    Always,
}

/// Configuration shared by the executable filter, the simulator and the CLI.
///
/// `bits` is the total memory `M`. A two-phase filter splits it into two
/// arrays of `floor(M / 2)` bits; `sigma` and the hash range then refer to
/// one array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "kebab-case"))]
pub struct FilterParams {
    pub bits: usize,
    pub hashes: usize,
    pub hash_variant: HashVariant,
    pub retention: Retention,
    pub recycle: RecyclePolicy,
    pub phases: Phases,
    #[cfg_attr(feature = "serde", serde(default))]
    pub two_phase_insert: TwoPhaseInsert,
}

impl FilterParams {
    /// A validated σ-bounded, colliding, non-retaining, one-phase filter.
    pub fn sigma_bounded(bits: usize, hashes: usize, sigma: usize) -> Result<Self> {
        let params = FilterParams {
            bits,
            hashes,
            hash_variant: HashVariant::Colliding,
            retention: Retention::NonRetaining,
            recycle: RecyclePolicy::SigmaBounded { sigma },
            phases: Phases::One,
            two_phase_insert: TwoPhaseInsert::OnCombinedMiss,
        };
        params.validate()?;
        Ok(params)
    }

    /// A validated N-bounded, colliding, non-retaining, one-phase filter.
    pub fn n_bounded(bits: usize, hashes: usize, limit: u64, oracle: bool) -> Result<Self> {
        let params = FilterParams {
            recycle: RecyclePolicy::NBounded { limit, oracle },
            ..FilterParams::sigma_bounded(bits, hashes, 0)?
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_hash_variant(mut self, hash_variant: HashVariant) -> Self {
        self.hash_variant = hash_variant;
        self
    }

    pub fn with_retention(mut self, retention: Retention) -> Self {
        self.retention = retention;
        self
    }

    pub fn with_phases(mut self, phases: Phases) -> Self {
        self.phases = phases;
        self
    }

    pub fn with_two_phase_insert(mut self, policy: TwoPhaseInsert) -> Self {
        self.two_phase_insert = policy;
        self
    }

    /// Bits per array: `M` for one phase, `floor(M / 2)` for two.
    pub fn array_bits(&self) -> usize {
        match self.phases {
            Phases::One => self.bits,
            Phases::Two => self.bits / 2,
        }
    }

    pub fn sigma(&self) -> Option<usize> {
        match self.recycle {
            RecyclePolicy::SigmaBounded { sigma } => Some(sigma),
            RecyclePolicy::NBounded { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.bits >= 1, "M must be at least 1 (got {})", self.bits);
        if self.phases == Phases::Two {
            ensure!(
                self.bits >= 2,
                "two-phase filters need M >= 2 so each array has at least one bit (got M = {})",
                self.bits
            );
        }
        let array = self.array_bits();
        ensure!(
            self.hashes >= 1 && self.hashes <= array,
            "k must satisfy 1 <= k <= {} bits per array (got k = {})",
            array,
            self.hashes
        );
        match self.recycle {
            RecyclePolicy::SigmaBounded { sigma } => ensure!(
                sigma < array,
                "sigma must satisfy 0 <= sigma < {} bits per array (got sigma = {})",
                array,
                sigma
            ),
            RecyclePolicy::NBounded { limit, .. } => {
                ensure!(limit >= 1, "N must be at least 1 (got {})", limit)
            }
        }
        Ok(())
    }
}
