//! Capacity planning: how many messages per cycle a filter of `M` bits can
//! hold while its average false-positive rate stays within a target.

use core::ops::RangeInclusive;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::bounds::{max_messages, Bound, DEFAULT_SEARCH_CAP};
use crate::error::{ensure, Error, Result};
use crate::markov::{CapacityConvention, ModelVariant, SigmaModel};

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerOptions {
    /// Must be non-retaining: capacity is only modeled from an empty start.
    pub variant: ModelVariant,
    pub hashes: RangeInclusive<usize>,
    pub convention: CapacityConvention,
    /// Upper limit on N for the N-bounded searches.
    pub search_cap: u64,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        PlannerOptions {
            variant: ModelVariant::CollidingNonRetaining,
            hashes: 1..=15,
            convention: CapacityConvention::Strict,
            search_cap: DEFAULT_SEARCH_CAP,
        }
    }
}

/// Which long-run rate the σ search constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "kebab-case"))]
pub enum PhaseModel {
    OnePhase,
    /// Each array has the planner's `bits`; pass `floor(M/2)` for a filter
    /// of total memory `M`.
    TwoPhase,
}

/// Best σ-bounded configuration found for one `(M, target)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SigmaPlan {
    pub bits: usize,
    pub sigma: usize,
    pub hashes: usize,
    /// `E[N_0]`.
    pub expected_messages: f64,
    /// The constrained rate at the chosen configuration.
    pub fp_rate: f64,
}

fn check_target(target: f64) -> Result<()> {
    ensure!(
        target > 0.0 && target < 1.0,
        "target must lie in (0, 1) (got {})",
        target
    );
    Ok(())
}

/// Long-run rate of one σ-bounded configuration.
pub fn sigma_rate(
    variant: ModelVariant,
    bits: usize,
    hashes: usize,
    sigma: usize,
    phase: PhaseModel,
) -> Result<f64> {
    let model = SigmaModel::solve(variant, bits, hashes, sigma)?;
    match phase {
        PhaseModel::OnePhase => Ok(model.one_phase_fp()),
        PhaseModel::TwoPhase => model.two_phase_fp(),
    }
}

const SPOT_CHECKS: usize = 9;

/// Largest σ in `0..M` whose rate is within `target`.
///
/// The rate is nondecreasing in σ, which a spot check over a coarse grid
/// confirms before binary search is trusted. If the spot check fails every
/// σ is scanned.
pub fn max_sigma(
    variant: ModelVariant,
    bits: usize,
    hashes: usize,
    target: f64,
    phase: PhaseModel,
) -> Result<usize> {
    let rate = |sigma: usize| sigma_rate(variant, bits, hashes, sigma, phase);
    let top = bits - 1;
    let mut monotone = true;
    let mut prev = f64::NEG_INFINITY;
    for s in 0..SPOT_CHECKS {
        let sigma = top * s / (SPOT_CHECKS - 1);
        let f = rate(sigma)?;
        if f < prev {
            monotone = false;
            break;
        }
        prev = f;
    }

    if !monotone {
        let mut best = None;
        for sigma in 0..=top {
            if rate(sigma)? <= target {
                best = Some(sigma);
            }
        }
        return best.ok_or(Error::NoFeasibleConfiguration);
    }

    if rate(0)? > target {
        return Err(Error::NoFeasibleConfiguration);
    }
    let (mut lo, mut hi) = (0, top);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if rate(mid)? <= target {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}

/// For each `k`, the largest feasible σ; returns the `(σ, k)` with the
/// largest expected messages per cycle (smallest `k` on ties).
pub fn plan_sigma_for(
    bits: usize,
    target: f64,
    options: &PlannerOptions,
    phase: PhaseModel,
) -> Result<SigmaPlan> {
    check_target(target)?;
    ensure!(bits >= 1, "M must be at least 1 (got {})", bits);
    ensure!(
        !options.variant.retains(),
        "capacity planning needs a non-retaining variant (got {})",
        options.variant
    );
    let mut best: Option<SigmaPlan> = None;
    for hashes in options.hashes.clone().filter(|&k| k >= 1 && k <= bits) {
        let sigma = max_sigma(options.variant, bits, hashes, target, phase)?;
        let model = SigmaModel::solve(options.variant, bits, hashes, sigma)?;
        let expected_messages = model.expected_capacity(options.convention)?;
        let fp_rate = match phase {
            PhaseModel::OnePhase => model.one_phase_fp(),
            PhaseModel::TwoPhase => model.two_phase_fp()?,
        };
        let candidate = SigmaPlan {
            bits,
            sigma,
            hashes,
            expected_messages,
            fp_rate,
        };
        if best.is_none_or(|b| expected_messages > b.expected_messages) {
            best = Some(candidate);
        }
    }
    best.ok_or(Error::NoFeasibleConfiguration)
}

/// One-phase σ plan over `options.hashes`.
pub fn plan_sigma(bits: usize, target: f64, options: &PlannerOptions) -> Result<SigmaPlan> {
    plan_sigma_for(bits, target, options, PhaseModel::OnePhase)
}

/// Capacity of every model at one `(M, target)`, each with its own best `k`,
/// normalized by the σ-bounded capacity.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CapacityPlan {
    pub bits: usize,
    pub target: f64,
    pub best_sigma: usize,
    pub best_k: usize,
    pub expected_messages_sigma: f64,
    pub n_worst: u64,
    pub k_worst: usize,
    pub n_avg: u64,
    pub k_avg: usize,
    pub n_oracle: u64,
    pub k_oracle: usize,
    pub ratio_worst: f64,
    pub ratio_avg: f64,
    pub ratio_oracle: f64,
}

fn best_n(bound: Bound, bits: usize, target: f64, options: &PlannerOptions) -> (u64, usize) {
    let mut best = (0, *options.hashes.start());
    for hashes in options.hashes.clone().filter(|&k| k >= 1 && k <= bits) {
        let n = max_messages(bound, bits, hashes, target, options.search_cap);
        if n > best.0 {
            best = (n, hashes);
        }
    }
    best
}

pub fn compare_capacities(bits: usize, target: f64, options: &PlannerOptions) -> Result<CapacityPlan> {
    let plan = plan_sigma(bits, target, options)?;
    let (n_worst, k_worst) = best_n(Bound::WorstCase, bits, target, options);
    let (n_avg, k_avg) = best_n(Bound::AverageCase, bits, target, options);
    let (n_oracle, k_oracle) = best_n(Bound::Oracle, bits, target, options);
    let ratio = |n: u64| n as f64 / plan.expected_messages;
    Ok(CapacityPlan {
        bits,
        target,
        best_sigma: plan.sigma,
        best_k: plan.hashes,
        expected_messages_sigma: plan.expected_messages,
        n_worst,
        k_worst,
        n_avg,
        k_avg,
        n_oracle,
        k_oracle,
        ratio_worst: ratio(n_worst),
        ratio_avg: ratio(n_avg),
        ratio_oracle: ratio(n_oracle),
    })
}

/// Denominator of the one- vs two-phase capacity ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "kebab-case"))]
pub enum CapacityNormalization {
    /// Messages per swap of the two-phase filter (one active cycle).
    #[default]
    PerSwap,
    /// Messages held across both arrays, `2 E[N_0]`.
    PerTotalMemory,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PhaseComparison {
    pub bits: usize,
    pub target: f64,
    pub one_phase: SigmaPlan,
    /// Planned on `floor(M/2)` bits per array.
    pub two_phase: SigmaPlan,
    pub normalization: CapacityNormalization,
    /// One-phase capacity over two-phase capacity. Infinite when only the
    /// two-phase capacity is zero; 1 when both are.
    pub ratio: f64,
}

pub fn one_vs_two_phase(
    bits: usize,
    target: f64,
    options: &PlannerOptions,
    normalization: CapacityNormalization,
) -> Result<PhaseComparison> {
    ensure!(bits >= 2, "two-phase comparison needs M >= 2 (got {})", bits);
    let one_phase = plan_sigma_for(bits, target, options, PhaseModel::OnePhase)?;
    let two_phase = plan_sigma_for(bits / 2, target, options, PhaseModel::TwoPhase)?;
    let denominator = match normalization {
        CapacityNormalization::PerSwap => two_phase.expected_messages,
        CapacityNormalization::PerTotalMemory => 2.0 * two_phase.expected_messages,
    };
    let ratio = match (one_phase.expected_messages, denominator) {
        (a, b) if b > 0.0 => a / b,
        (a, _) if a > 0.0 => f64::INFINITY,
        _ => 1.0,
    };
    Ok(PhaseComparison {
        bits,
        target,
        one_phase,
        two_phase,
        normalization,
        ratio,
    })
}
