use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure, Result};
use crate::params::HashVariant;

use super::ModelVariant;

/// Distribution of the bit count after applying `hashes` hash functions of
/// one message to a filter that starts with `start` bits set.
///
/// Returns `(dist, overflow)`: `dist[d]` is the probability of ending at
/// `start + d` bits (only `start + d <= sigma` is tracked), and `overflow` is
/// the mass that crossed `sigma` at some hash. The bit count never
/// decreases, so mass that crosses `sigma` stays above it.
///
/// The recursion runs level by level over the hash index and keeps a single
/// buffer of `hashes + 1` values.
pub fn insertion_distribution(
    variant: HashVariant,
    bits: usize,
    sigma: usize,
    start: usize,
    hashes: usize,
) -> (Vec<f64>, f64) {
    let mut dist = vec![0.0; hashes + 1];
    let overflow = level_recursion(variant, bits, sigma, start, hashes, &mut dist);
    (dist, overflow)
}

fn level_recursion(
    variant: HashVariant,
    bits: usize,
    sigma: usize,
    start: usize,
    hashes: usize,
    dist: &mut [f64],
) -> f64 {
    debug_assert!(start <= sigma && sigma < bits);
    let m = bits as f64;
    let headroom = sigma - start;
    dist.fill(0.0);
    dist[0] = 1.0;
    let mut overflow = 0.0;
    for h in 1..=hashes {
        // Non-colliding: the h-th hash picks among the bits the first h - 1
        // hashes of this message did not pick.
        let (pool, own) = match variant {
            HashVariant::Colliding => (m, 0.0),
            HashVariant::NonColliding => ((bits - (h - 1)) as f64, (h - 1) as f64),
        };
        let top = (h - 1).min(headroom);
        if start + top == sigma {
            overflow += dist[top] * (m - sigma as f64) / pool;
        }
        let reach = h.min(headroom);
        for d in (0..=reach).rev() {
            let j = (start + d) as f64;
            let stay = if d <= top {
                dist[d] * ((j - own).max(0.0) / pool)
            } else {
                0.0
            };
            let step = if d >= 1 {
                dist[d - 1] * ((m - j + 1.0) / pool)
            } else {
                0.0
            };
            dist[d] = stay + step;
        }
    }
    overflow
}

/// One-arrival transition probabilities of the σ-bounded chain for one
/// variant.
///
/// Row `i` holds the forward band `τ(i, i..=min(i + k, σ))` and the overflow
/// mass (the probability that the arrival pushes the count past σ). Where
/// the overflow mass lands is given by [`reset_distribution`]
/// (`TransitionTable::reset_distribution`): state 0 for non-retaining
/// filters, the from-empty insertion distribution for retaining ones.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionTable {
    variant: ModelVariant,
    bits: usize,
    hashes: usize,
    sigma: usize,
    forward: Vec<f64>,
    overflow: Vec<f64>,
    reset: Vec<f64>,
}

impl TransitionTable {
    /// Builds the table in `O(σ k²)` time.
    pub fn build(variant: ModelVariant, bits: usize, hashes: usize, sigma: usize) -> Result<Self> {
        ensure!(bits >= 1, "M must be at least 1 (got {})", bits);
        ensure!(
            hashes >= 1 && hashes <= bits,
            "k must satisfy 1 <= k <= M = {} (got k = {})",
            bits,
            hashes
        );
        ensure!(
            sigma < bits,
            "sigma must satisfy 0 <= sigma < M = {} (got sigma = {})",
            bits,
            sigma
        );
        let width = hashes + 1;
        let hash = variant.hash_variant();
        let mut forward = vec![0.0; (sigma + 1) * width];
        let mut overflow = vec![0.0; sigma + 1];
        for (i, (row, over)) in forward.chunks_exact_mut(width).zip(&mut overflow).enumerate() {
            // Rounding can push a certain overflow a few ulps past 1.
            *over = level_recursion(hash, bits, sigma, i, hashes, row).min(1.0);
        }

        // Retaining: the triggering message is re-hashed into the empty
        // filter. If even that overflows, the filter stays empty.
        let reset = match variant.retains() {
            false => vec![1.0],
            true => {
                let mut r: Vec<f64> = forward[..width.min(sigma + 1)].to_vec();
                r[0] += overflow[0];
                r
            }
        };

        Ok(TransitionTable {
            variant,
            bits,
            hashes,
            sigma,
            forward,
            overflow,
            reset,
        })
    }

    pub fn variant(&self) -> ModelVariant {
        self.variant
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn hashes(&self) -> usize {
        self.hashes
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    /// Number of states, `σ + 1`.
    pub fn states(&self) -> usize {
        self.sigma + 1
    }

    /// Forward probability `τ(i, j)` for `i <= j <= σ`, without the
    /// recycle contribution.
    pub fn forward(&self, i: usize, j: usize) -> f64 {
        if j < i || j - i > self.hashes || j > self.sigma {
            0.0
        } else {
            self.forward[i * (self.hashes + 1) + (j - i)]
        }
    }

    /// Forward band of row `i`: entry `d` is `τ(i, i + d)`.
    pub fn forward_row(&self, i: usize) -> &[f64] {
        let width = self.hashes + 1;
        let row = &self.forward[i * width..(i + 1) * width];
        &row[..=(self.sigma - i).min(self.hashes)]
    }

    /// Probability that an arrival in state `i` pushes the count past σ.
    /// For non-retaining variants this is the backward entry `τ(i, 0)`.
    pub fn overflow(&self, i: usize) -> f64 {
        self.overflow[i]
    }

    /// Where the chain lands after a recycle: entry `j` is the probability of
    /// restarting with `j` bits set.
    pub fn reset_distribution(&self) -> &[f64] {
        &self.reset
    }

    /// Full chain transition probability, recycles included.
    pub fn prob(&self, i: usize, j: usize) -> f64 {
        let back = self.reset.get(j).copied().unwrap_or(0.0);
        (self.forward(i, j) + self.overflow[i] * back).min(1.0)
    }

    /// Nonzero `(j, τ(i, j))` pairs of row `i` of the full chain, ascending
    /// in `j`.
    pub fn row_entries(&self, i: usize) -> Vec<(usize, f64)> {
        let mut out = Vec::with_capacity(self.hashes + self.reset.len() + 1);
        let reset_end = self.reset.len();
        for j in 0..reset_end.min(i) {
            out.push((j, self.prob(i, j)));
        }
        let hi = (i + self.hashes).min(self.sigma).max(reset_end.saturating_sub(1));
        for j in i..=hi {
            out.push((j, self.prob(i, j)));
        }
        out.retain(|&(_, p)| p != 0.0);
        out
    }

    /// Every nonzero `(i, j, τ(i, j))` of the full chain in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.states()).flat_map(move |i| self.row_entries(i).into_iter().map(move |(j, p)| (i, j, p)))
    }

    /// Largest `|Σ_j τ(i, j) - 1|` over all rows.
    pub fn max_row_defect(&self) -> f64 {
        (0..self.states())
            .map(|i| {
                let s: f64 = self.row_entries(i).iter().map(|&(_, p)| p).sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}
