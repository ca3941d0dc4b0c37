//! Executable recycling Bloom filters.

use alloc::vec::Vec;

use bitvec::vec::BitVec;

use crate::error::Result;
use crate::hashing::HashAssignment;
use crate::params::{FilterParams, Phases, RecyclePolicy, Retention, TwoPhaseInsert};

/// What one call to [`RecyclingBloomFilter::insert`] observed and did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InsertOutcome {
    /// Bits set in the active array before the arrival.
    pub bits_before: usize,
    /// Bits set in the active array once the insertion (and any recycle)
    /// completed.
    pub bits_after: usize,
    /// Previously unset active bits this message covers. Counted even when
    /// the insertion overflowed and was not applied.
    pub new_bits_set: usize,
    pub classified_repeat: bool,
    pub triggered_recycle: bool,
    /// A new message classified as a repeat.
    pub is_false_positive: bool,
}

/// A one- or two-phase recycling Bloom filter.
///
/// Single writer; `query` takes `&self` and never mutates.
#[derive(Debug, Clone)]
pub struct RecyclingBloomFilter {
    params: FilterParams,
    arrays: Vec<BitVec<u64>>,
    active: usize,
    bits_set: usize,
    frozen_bits_set: usize,
    cycle_count: u64,
    counted: u64,
    fresh: Vec<usize>,
}

impl RecyclingBloomFilter {
    pub fn new(params: FilterParams) -> Result<Self> {
        params.validate()?;
        let n_arrays = match params.phases {
            Phases::One => 1,
            Phases::Two => 2,
        };
        let arrays = (0..n_arrays)
            .map(|_| BitVec::repeat(false, params.array_bits()))
            .collect();
        Ok(RecyclingBloomFilter {
            params,
            arrays,
            active: 0,
            bits_set: 0,
            frozen_bits_set: 0,
            cycle_count: 0,
            counted: 0,
            fresh: Vec::with_capacity(params.hashes),
        })
    }

    pub fn params(&self) -> &FilterParams {
        &self.params
    }

    /// Bits set in the active array.
    pub fn bits_set(&self) -> usize {
        self.bits_set
    }

    /// Bits set in the frozen array (two-phase only).
    pub fn frozen_bits_set(&self) -> Option<usize> {
        (self.params.phases == Phases::Two).then_some(self.frozen_bits_set)
    }

    /// Index (0 or 1) of the array currently receiving insertions.
    pub fn active_index(&self) -> usize {
        self.active
    }

    /// Recycles (one-phase) or swaps (two-phase) so far.
    pub fn cycle_count(&self) -> u64 {
        self.cycle_count
    }

    /// Insertions counted toward an N-bounded limit in the current cycle.
    pub fn counted_in_cycle(&self) -> u64 {
        self.counted
    }

    /// Population count of the active array, recomputed from the bits.
    pub fn active_popcount(&self) -> usize {
        self.arrays[self.active].count_ones()
    }

    /// True iff every index is set in at least one array.
    pub fn query(&self, assignment: &HashAssignment) -> bool {
        self.arrays
            .iter()
            .any(|array| assignment.indices.iter().all(|&i| array[i]))
    }

    /// Processes one arrival.
    ///
    /// `is_new` is ground truth from the workload: it only decides whether a
    /// repeat classification is a false positive and, for the oracle
    /// N-bounded user, what gets counted.
    pub fn insert(&mut self, assignment: &HashAssignment, is_new: bool) -> InsertOutcome {
        let bits_before = self.bits_set;
        let classified_repeat = self.query(assignment);
        self.collect_fresh(assignment);

        let store = match (self.params.phases, self.params.two_phase_insert) {
            (Phases::Two, TwoPhaseInsert::OnCombinedMiss) => !classified_repeat,
            _ => !self.fresh.is_empty(),
        };
        let new_bits_set = if store { self.fresh.len() } else { 0 };
        let mut triggered_recycle = false;

        match self.params.recycle {
            RecyclePolicy::SigmaBounded { sigma } => {
                if new_bits_set > 0 {
                    if self.bits_set + new_bits_set > sigma {
                        self.recycle_on_overflow(assignment, sigma);
                        triggered_recycle = true;
                    } else {
                        self.apply_fresh();
                    }
                }
            }
            RecyclePolicy::NBounded { limit, oracle } => {
                if new_bits_set > 0 {
                    self.apply_fresh();
                }
                let counts = if oracle { is_new } else { new_bits_set > 0 };
                if counts {
                    self.counted += 1;
                    if self.counted >= limit {
                        self.recycle_after_limit(assignment, limit);
                        triggered_recycle = true;
                    }
                }
            }
        }

        InsertOutcome {
            bits_before,
            bits_after: self.bits_set,
            new_bits_set,
            classified_repeat,
            triggered_recycle,
            is_false_positive: is_new && classified_repeat,
        }
    }

    fn collect_fresh(&mut self, assignment: &HashAssignment) {
        let array = &self.arrays[self.active];
        self.fresh.clear();
        self.fresh
            .extend(assignment.indices.iter().copied().filter(|&i| !array[i]));
        self.fresh.sort_unstable();
        self.fresh.dedup();
    }

    fn apply_fresh(&mut self) {
        let array = &mut self.arrays[self.active];
        for &i in &self.fresh {
            array.set(i, true);
        }
        self.bits_set += self.fresh.len();
    }

    /// Sets every bit of `assignment` in the (empty) active array if that
    /// stays within `max_bits`.
    fn reinsert(&mut self, assignment: &HashAssignment, max_bits: usize) {
        debug_assert_eq!(self.bits_set, 0);
        if assignment.distinct() > max_bits {
            return;
        }
        self.collect_fresh(assignment);
        self.apply_fresh();
    }

    /// Clears the active array (one phase) or clears the frozen array and
    /// swaps roles (two phase). The old active array is frozen as-is.
    fn start_cycle(&mut self) {
        match self.params.phases {
            Phases::One => self.arrays[self.active].fill(false),
            Phases::Two => {
                let frozen = 1 - self.active;
                self.arrays[frozen].fill(false);
                self.frozen_bits_set = self.bits_set;
                self.active = frozen;
            }
        }
        self.bits_set = 0;
        self.counted = 0;
        self.cycle_count += 1;
    }

    // The overflowing insertion is never applied, so a frozen array holds at
    // most sigma bits.
    fn recycle_on_overflow(&mut self, assignment: &HashAssignment, sigma: usize) {
        self.start_cycle();
        if self.params.retention == Retention::Retaining {
            self.reinsert(assignment, sigma);
        }
    }

    // The limit-th insertion was applied before the recycle. A two-phase
    // filter keeps it in the now-frozen array, so retention only matters for
    // one phase.
    fn recycle_after_limit(&mut self, assignment: &HashAssignment, limit: u64) {
        self.start_cycle();
        if self.params.retention == Retention::Retaining
            && self.params.phases == Phases::One
            && limit > 1
        {
            self.reinsert(assignment, self.params.array_bits());
            self.counted = 1;
        }
    }
}
