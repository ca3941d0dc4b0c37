use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

use super::{ModelVariant, TransitionTable};

/// Stationary distribution over `0..=σ` bits set.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub variant: ModelVariant,
    pub bits: usize,
    pub hashes: usize,
    pub sigma: usize,
    pub pi: Vec<f64>,
}

/// Solves the stationary distribution of `table` in `O(σ k)` time.
///
/// Every recycle sends its mass to the same restart distribution `r`, so the
/// backward part of the balance equations is `Φ · r(i)` with a single
/// unknown: the total overflow flux `Φ = Σ_j π_j · overflow(j)`. Fixing
/// `Φ = 1` and sweeping states upward,
///
/// ```text
/// π_i = (Σ_{j=i-k}^{i-1} π_j τ(j, i) + Φ r(i)) / (1 - τ(i, i))
/// ```
///
/// determines every `π_i`. Summing all balance equations shows that the
/// result satisfies the definition of `Φ` up to scale, so normalizing the
/// sweep gives the exact solution. Non-retaining chains have `r = δ_0`
/// (the sweep starts from the guess `π_0 = 1`). Retaining chains restart
/// on `1..=k`, so state 0 is transient unless `σ < k`.
pub fn steady_state(table: &TransitionTable) -> Result<SteadyState> {
    let states = table.states();
    let k = table.hashes();
    let reset = table.reset_distribution();
    let mut pi = vec![0.0; states];
    for i in 0..states {
        let lo = i.saturating_sub(k);
        let inflow: f64 = (lo..i).map(|j| pi[j] * table.forward(j, i)).sum::<f64>()
            + reset.get(i).copied().unwrap_or(0.0);
        let leave = 1.0 - table.forward(i, i);
        if leave <= 0.0 {
            return Err(Error::NumericalFailure("state with no way out"));
        }
        pi[i] = inflow / leave;
    }
    let total: f64 = pi.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::NumericalFailure("steady-state normalizer is not positive"));
    }
    pi.iter_mut().for_each(|p| *p /= total);
    Ok(SteadyState {
        variant: table.variant(),
        bits: table.bits(),
        hashes: table.hashes(),
        sigma: table.sigma(),
        pi,
    })
}

impl SteadyState {
    /// Largest per-state violation of global balance,
    /// `|π_i (1 - τ(i,i)) - Σ_{j≠i} π_j τ(j,i)|`.
    pub fn balance_residual(&self, table: &TransitionTable) -> f64 {
        let mut inflow = vec![0.0; self.pi.len()];
        let mut stay = vec![0.0; self.pi.len()];
        for (i, j, p) in table.entries() {
            if i == j {
                stay[i] = p;
            } else {
                inflow[j] += self.pi[i] * p;
            }
        }
        self.pi
            .iter()
            .zip(inflow.iter().zip(&stay))
            .map(|(&p, (&inn, &s))| (p * (1.0 - s) - inn).abs())
            .fold(0.0, f64::max)
    }
}
