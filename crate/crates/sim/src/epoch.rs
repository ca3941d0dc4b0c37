//! One simulation epoch: a fresh filter driven by a stream of arrivals.

use std::collections::HashMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rbf_core::{FilterParams, IdealHasher, Phases, RecyclePolicy, RecyclingBloomFilter};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::workload::Workload;

/// Extra per-epoch observations, off by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct TraceOptions {
    /// New messages per bin of the position-in-cycle histogram.
    pub bin_width: u64,
    /// Number of bins; later positions land in the last one.
    pub bins: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { bin_width: 10, bins: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct EpochTrace {
    /// `recycle_states[b]`: recycles that happened with `b` bits set in the
    /// array being retired (the array a two-phase filter freezes).
    pub recycle_states: Vec<u64>,
    pub bin_width: u64,
    /// New messages by their position among the new messages of their
    /// cycle.
    pub new_by_position: Vec<u64>,
    pub fp_by_position: Vec<u64>,
}

/// Counts and rates of one epoch.
///
/// With `F_i` the false-positive indicator of the first arrival of the
/// `i`-th new message of a cycle and `η(i)` its number of arrivals in that
/// cycle:
///
/// - count-instance: `Σ F_i / Σ 1`, per new message
/// - count-first: `Σ F_i / Σ η(i)`, per arrival
/// - count-each: `Σ F_i η(i) / Σ η(i)`, per arrival
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct EpochStats {
    pub seed: u64,
    pub arrivals: u64,
    pub new_messages: u64,
    /// `Σ F_i`, the numerator of count-instance.
    pub fp_count_instance: u64,
    /// `Σ F_i`, the numerator of count-first.
    pub fp_count_first: u64,
    /// `Σ F_i η(i)`.
    pub fp_count_each: u64,
    pub rate_count_instance: f64,
    pub rate_count_first: f64,
    pub rate_count_each: f64,
    pub cycles: u64,
    /// New messages per completed cycle, the arrival that triggered the
    /// recycle included.
    pub mean_new_per_cycle: f64,
    /// Messages that found at least one unset bit, per completed cycle.
    pub mean_bit_setting_per_cycle: f64,
    pub max_bits_set: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<EpochTrace>,
}

#[derive(Debug, Clone, Copy)]
struct Seen {
    cycle: u64,
    false_positive: bool,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Runs `arrivals` arrivals of `workload` through a new filter.
///
/// A message is new if it has not arrived during the current cycle (one
/// phase) or the current and previous cycles (two phase): exactly the
/// messages whose bits the filter may still hold. A message re-inserted by a
/// retaining recycle counts as seen in the new cycle.
pub fn run_epoch(params: &FilterParams, workload: &Workload, arrivals: u64, seed: u64) -> Result<EpochStats> {
    run_epoch_inner(params, workload, arrivals, seed, None)
}

pub fn run_epoch_traced(
    params: &FilterParams,
    workload: &Workload,
    arrivals: u64,
    seed: u64,
    trace: TraceOptions,
) -> Result<EpochStats> {
    run_epoch_inner(params, workload, arrivals, seed, Some(trace))
}

pub(crate) fn run_epoch_inner(
    params: &FilterParams,
    workload: &Workload,
    arrivals: u64,
    seed: u64,
    trace_opts: Option<TraceOptions>,
) -> Result<EpochStats> {
    params.validate()?;
    workload.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hasher = IdealHasher::new(params, rng.next_u64());
    let mut filter = RecyclingBloomFilter::new(*params)?;
    let window = match params.phases {
        Phases::One => 0,
        Phases::Two => 1,
    };
    let sigma_bounded = matches!(params.recycle, RecyclePolicy::SigmaBounded { .. });

    let mut trace = trace_opts.map(|t| EpochTrace {
        recycle_states: vec![0; params.array_bits() + 1],
        bin_width: t.bin_width.max(1),
        new_by_position: vec![0; t.bins.max(1)],
        fp_by_position: vec![0; t.bins.max(1)],
    });

    let mut seen: HashMap<u64, Seen> = HashMap::new();
    let mut assignment = rbf_core::HashAssignment {
        message: rbf_core::MessageId(0),
        indices: Vec::with_capacity(params.hashes),
    };
    let (mut new_messages, mut fp_first, mut fp_each) = (0u64, 0u64, 0u64);
    let (mut cycle_new, mut cycle_setting) = (0u64, 0u64);
    let (mut total_new, mut total_setting) = (0u64, 0u64);
    let mut max_bits_set = 0;

    for message in workload.stream(rng).take(arrivals as usize) {
        let cycle = filter.cycle_count();
        let prior = seen
            .get(&message.0)
            .filter(|s| cycle - s.cycle <= window)
            .copied();
        let is_new = prior.is_none();

        assignment.message = message;
        hasher.assign_into(message, &mut assignment.indices);
        let out = filter.insert(&assignment, is_new);
        max_bits_set = max_bits_set.max(filter.bits_set());

        match prior {
            Some(s) => {
                if s.false_positive {
                    fp_each += 1;
                }
            }
            None => {
                new_messages += 1;
                if out.is_false_positive {
                    fp_first += 1;
                    fp_each += 1;
                }
                if let Some(t) = trace.as_mut() {
                    let bin = ((cycle_new / t.bin_width) as usize).min(t.new_by_position.len() - 1);
                    t.new_by_position[bin] += 1;
                    if out.is_false_positive {
                        t.fp_by_position[bin] += 1;
                    }
                }
                cycle_new += 1;
                let stamp = if out.triggered_recycle && out.bits_after > 0 {
                    filter.cycle_count()
                } else {
                    cycle
                };
                seen.insert(
                    message.0,
                    Seen {
                        cycle: stamp,
                        false_positive: out.is_false_positive,
                    },
                );
            }
        }
        if out.new_bits_set > 0 {
            cycle_setting += 1;
        }

        if out.triggered_recycle {
            if let Some(t) = trace.as_mut() {
                let retired = if sigma_bounded {
                    out.bits_before
                } else {
                    out.bits_before + out.new_bits_set
                };
                t.recycle_states[retired] += 1;
            }
            total_new += cycle_new;
            total_setting += cycle_setting;
            cycle_new = 0;
            cycle_setting = 0;
        }
    }

    let cycles = filter.cycle_count();
    Ok(EpochStats {
        seed,
        arrivals,
        new_messages,
        fp_count_instance: fp_first,
        fp_count_first: fp_first,
        fp_count_each: fp_each,
        rate_count_instance: ratio(fp_first, new_messages),
        rate_count_first: ratio(fp_first, arrivals),
        rate_count_each: ratio(fp_each, arrivals),
        cycles,
        mean_new_per_cycle: ratio(total_new, cycles),
        mean_bit_setting_per_cycle: ratio(total_setting, cycles),
        max_bits_set,
        trace,
    })
}
