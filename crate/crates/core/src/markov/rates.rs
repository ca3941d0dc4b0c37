use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::params::HashVariant;

use super::{SteadyState, TransitionTable};

/// Probability that a new message is a false positive when `i` of `bits`
/// bits are set: `(i/M)^k` colliding, `C(i,k) / C(M,k)` non-colliding.
pub fn per_state_fp(i: usize, bits: usize, hashes: usize, hash: HashVariant) -> f64 {
    debug_assert!(i <= bits);
    match hash {
        HashVariant::Colliding => libm::pow(i as f64 / bits as f64, hashes as f64),
        HashVariant::NonColliding if i < hashes => 0.0,
        HashVariant::NonColliding => (0..hashes)
            .map(|t| (i - t) as f64 / (bits - t) as f64)
            .product(),
    }
}

/// `ρ(0..=upto)` in one pass.
///
/// The non-colliding profile uses `C(i+1,k) = C(i,k) (i+1)/(i+1-k)`, so
/// each term costs O(1). If `ρ(k) = 1/C(M,k)` is too small for a normal
/// double the ratio is accumulated in log space instead.
pub fn fp_profile(bits: usize, hashes: usize, hash: HashVariant, upto: usize) -> Vec<f64> {
    match hash {
        HashVariant::Colliding => (0..=upto)
            .map(|i| per_state_fp(i, bits, hashes, hash))
            .collect(),
        HashVariant::NonColliding => {
            let mut out = vec![0.0; upto + 1];
            if upto < hashes {
                return out;
            }
            let k = hashes as f64;
            let first = per_state_fp(hashes, bits, hashes, hash);
            if first > f64::MIN_POSITIVE * 1e10 {
                let mut rho = first;
                out[hashes] = rho;
                for (i, slot) in out.iter_mut().enumerate().skip(hashes + 1) {
                    rho *= i as f64 / (i as f64 - k);
                    *slot = rho;
                }
            } else {
                let mut log_rho: f64 = (0..hashes)
                    .map(|t| libm::log((hashes - t) as f64 / (bits - t) as f64))
                    .sum();
                out[hashes] = libm::exp(log_rho);
                for (i, slot) in out.iter_mut().enumerate().skip(hashes + 1) {
                    log_rho += libm::log(i as f64 / (i as f64 - k));
                    *slot = libm::exp(log_rho);
                }
            }
            out
        }
    }
}

/// Long-run average false-positive rate of a one-phase filter,
/// `Σ_i π_i ρ(i)`.
pub fn one_phase_fp(steady: &SteadyState) -> f64 {
    let rho = fp_profile(steady.bits, steady.hashes, steady.variant.hash_variant(), steady.sigma);
    steady.pi.iter().zip(&rho).map(|(p, r)| p * r).sum()
}

/// Closed form of the one-phase rate for colliding, non-retaining, `k = 1`:
/// `Σ_{i=0}^{σ} i / (M (M - i) Σ_{j=0}^{σ} 1/(M - j))`.
///
/// # Panics
///
/// If `sigma >= bits`.
pub fn closed_form_k1(bits: usize, sigma: usize) -> f64 {
    assert!(sigma < bits, "sigma must be below M");
    let m = bits as f64;
    let harmonic: f64 = (0..=sigma).map(|j| 1.0 / (m - j as f64)).sum();
    (0..=sigma)
        .map(|i| i as f64 / (m * (m - i as f64) * harmonic))
        .sum()
}

/// Bits set in the frozen array of a two-phase filter, in steady state.
///
/// Only states that can overflow, `σ-k+1..=σ`, carry mass.
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenDistribution {
    pub bits: usize,
    pub hashes: usize,
    pub hash: HashVariant,
    /// First state of the window.
    pub start: usize,
    /// `weights[d]` is `F_{start + d}`.
    pub weights: Vec<f64>,
}

impl FrozenDistribution {
    pub fn get(&self, i: usize) -> f64 {
        i.checked_sub(self.start)
            .and_then(|d| self.weights.get(d))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights.iter().enumerate().map(|(d, &w)| (self.start + d, w))
    }

    /// `Σ_i F_i ρ(i)`.
    pub fn fp(&self) -> f64 {
        self.iter()
            .map(|(i, w)| w * per_state_fp(i, self.bits, self.hashes, self.hash))
            .sum()
    }
}

/// `F_i ∝ π_i · overflow(i)`: the state an array is frozen in is the state
/// it was in when an arrival overflowed it.
pub fn frozen_distribution(steady: &SteadyState, table: &TransitionTable) -> Result<FrozenDistribution> {
    if table.variant().retains() {
        return Err(Error::Unsupported(
            "frozen distribution needs a non-retaining table",
        ));
    }
    let sigma = table.sigma();
    let start = (sigma + 1).saturating_sub(table.hashes());
    let mut weights: Vec<f64> = (start..=sigma)
        .map(|i| steady.pi[i] * table.overflow(i))
        .collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::NumericalFailure("frozen distribution has no mass"));
    }
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(FrozenDistribution {
        bits: table.bits(),
        hashes: table.hashes(),
        hash: table.variant().hash_variant(),
        start,
        weights,
    })
}

/// Two-phase long-run rate: a message is a false positive if it matches the
/// active array or the frozen one,
/// `1 - (1 - Σ_j π_j ρ(j)) (1 - Σ_i F_i ρ(i))`.
pub fn two_phase_fp(steady: &SteadyState, frozen: &FrozenDistribution) -> f64 {
    assert!(
        steady.bits == frozen.bits && steady.hashes == frozen.hashes,
        "steady state and frozen distribution describe different arrays"
    );
    let active = one_phase_fp(steady);
    1.0 - (1.0 - active) * (1.0 - frozen.fp())
}
