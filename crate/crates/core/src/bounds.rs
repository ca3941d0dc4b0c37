//! N-bounded false-positive formulas.
//!
//! `f_w` is the classic worst-case rate of the next message after `n`
//! insertions. The two averages describe a filter recycled after `N`
//! insertions: `f_o` for an oracle user who counts every new message, and
//! `f_a`, a lower bound for a real user who only counts messages that set
//! bits.

use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Default upper limit for [`max_messages`].
pub const DEFAULT_SEARCH_CAP: u64 = 1 << 20;

/// `[1 - (1 - 1/M)^{k n}]^k`, the false-positive probability of the
/// `(n+1)`-th message.
pub fn worst_case_fp(bits: usize, hashes: usize, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let exponent = hashes as f64 * n as f64;
    // 1 - (1 - 1/M)^{kn} without cancellation.
    let filled = -libm::expm1(exponent * libm::log1p(-1.0 / bits as f64));
    libm::pow(filled, hashes as f64)
}

/// The `k` among `floor` and `ceil` of `(M/n) ln 2` (clamped to `1..=M`)
/// that minimizes [`worst_case_fp`].
pub fn optimal_k(bits: usize, n: u64) -> usize {
    assert!(n >= 1, "optimal k needs n >= 1");
    let ideal = bits as f64 / n as f64 * core::f64::consts::LN_2;
    let clamp = |x: f64| (x as usize).clamp(1, bits);
    let lo = clamp(libm::floor(ideal));
    let hi = clamp(libm::ceil(ideal));
    if worst_case_fp(bits, hi, n) < worst_case_fp(bits, lo, n) {
        hi
    } else {
        lo
    }
}

/// `f_i = P(F_i = 1) = f_w(M, k, i - 1)` for `i = 1..=N`.
pub fn per_insert_fp(bits: usize, hashes: usize, limit: u64) -> Vec<f64> {
    (1..=limit).map(|i| worst_case_fp(bits, hashes, i - 1)).collect()
}

/// `f_o = Σ_{i=1}^{N} f_i / N`.
pub fn oracle_avg_fp(bits: usize, hashes: usize, limit: u64) -> f64 {
    assert!(limit >= 1, "N must be at least 1");
    let total: f64 = (1..=limit).map(|i| worst_case_fp(bits, hashes, i - 1)).sum();
    total / limit as f64
}

/// `f_a = Σ x_i / Σ (1 + x_i)` with `x_i = f_i / (1 - f_i)`: each bit-setting
/// message is preceded by an expected `x_i` non-setting ones.
pub fn average_case_fp(bits: usize, hashes: usize, limit: u64) -> Result<f64> {
    ensure!(limit >= 1, "N must be at least 1 (got {})", limit);
    let mut num = 0.0;
    for i in 1..=limit {
        let f = worst_case_fp(bits, hashes, i - 1);
        if f >= 1.0 {
            return Err(Error::DegenerateBound { insertion: i });
        }
        num += f / (1.0 - f);
    }
    Ok(num / (limit as f64 + num))
}

/// Which N-bounded formula a capacity search inverts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "kebab-case"))]
pub enum Bound {
    /// Every message of the cycle, the last one included, meets the target:
    /// `f_w(N - 1) <= target`.
    WorstCase,
    /// `f_a(N) <= target`.
    AverageCase,
    /// `f_o(N) <= target`.
    Oracle,
}

/// Largest `N <= cap` whose bound stays within `target`.
///
/// All three bounds are nondecreasing in `N` and zero at `N = 1`. The
/// worst case is inverted by exponential then binary search; the averages
/// by a single prefix-sum scan, which is cheaper than re-summing per probe.
pub fn max_messages(bound: Bound, bits: usize, hashes: usize, target: f64, cap: u64) -> u64 {
    if target >= 1.0 {
        return cap;
    }
    if cap == 0 || target < 0.0 {
        return 0;
    }
    match bound {
        Bound::WorstCase => {
            let fits = |n: u64| worst_case_fp(bits, hashes, n - 1) <= target;
            if !fits(1) {
                return 0;
            }
            let mut lo = 1;
            let mut hi = 2;
            while hi <= cap && fits(hi) {
                lo = hi;
                hi = hi.saturating_mul(2);
            }
            if hi > cap {
                if fits(cap) {
                    return cap;
                }
                hi = cap;
            }
            // fits(lo) && !fits(hi)
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if fits(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        }
        Bound::AverageCase | Bound::Oracle => {
            let mut sum = 0.0;
            for n in 1..=cap {
                let f = worst_case_fp(bits, hashes, n - 1);
                let value = if bound == Bound::Oracle {
                    sum += f;
                    sum / n as f64
                } else if f >= 1.0 {
                    1.0
                } else {
                    sum += f / (1.0 - f);
                    sum / (n as f64 + sum)
                };
                if value > target {
                    return n - 1;
                }
            }
            cap
        }
    }
}

/// All three N-bounded rates for one configuration.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct BoundReport {
    pub bits: usize,
    pub hashes: usize,
    pub limit: u64,
    /// Rate of the message after `limit` insertions.
    pub worst_case: f64,
    pub oracle: f64,
    pub average_case: f64,
    /// `f_i` for `i = 1..=limit`, when requested.
    pub per_insert: Option<Vec<f64>>,
}

impl BoundReport {
    pub fn compute(bits: usize, hashes: usize, limit: u64, keep_per_insert: bool) -> Result<Self> {
        ensure!(bits >= 1, "M must be at least 1 (got {})", bits);
        ensure!(hashes >= 1, "k must be at least 1 (got {})", hashes);
        ensure!(limit >= 1, "N must be at least 1 (got {})", limit);
        let f = per_insert_fp(bits, hashes, limit);
        let oracle = f.iter().sum::<f64>() / limit as f64;
        let mut num = 0.0;
        for (i, &fi) in f.iter().enumerate() {
            if fi >= 1.0 {
                return Err(Error::DegenerateBound {
                    insertion: i as u64 + 1,
                });
            }
            num += fi / (1.0 - fi);
        }
        Ok(BoundReport {
            bits,
            hashes,
            limit,
            worst_case: worst_case_fp(bits, hashes, limit),
            oracle,
            average_case: num / (limit as f64 + num),
            per_insert: keep_per_insert.then_some(f),
        })
    }
}
