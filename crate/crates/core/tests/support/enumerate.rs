//! Brute-force chain over "bits set", built by enumerating every hash tuple.
//!
//! State `i` is represented by bits `0..i` being set. Each of the `M^k`
//! (colliding) or `M!/(M-k)!` (non-colliding) index tuples is equally
//! likely. Retaining overflow re-hashes the message into an empty filter,
//! which is the chain's modeling assumption.

#![allow(dead_code)]

use rbf_core::markov::ModelVariant;
use rbf_core::HashVariant;

fn tuples(bits: usize, hashes: usize, hash: HashVariant) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..hashes {
        let mut next = Vec::new();
        for t in &out {
            for x in 0..bits {
                if hash == HashVariant::NonColliding && t.contains(&x) {
                    continue;
                }
                let mut u = t.clone();
                u.push(x);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

fn distinct(t: &[usize]) -> usize {
    let mut v = t.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Dense `(σ+1) × (σ+1)` transition matrix.
pub fn dense_chain(variant: ModelVariant, bits: usize, hashes: usize, sigma: usize) -> Vec<Vec<f64>> {
    let all = tuples(bits, hashes, variant.hash_variant());
    let w = 1.0 / all.len() as f64;
    let n = sigma + 1;

    let mut fresh = vec![0.0; n];
    for t in &all {
        let d = distinct(t);
        fresh[if d <= sigma { d } else { 0 }] += w;
    }

    let mut p = vec![vec![0.0; n]; n];
    for (i, row) in p.iter_mut().enumerate() {
        for t in &all {
            let mut new: Vec<usize> = t.iter().copied().filter(|&x| x >= i).collect();
            new.sort_unstable();
            new.dedup();
            let j = i + new.len();
            if j <= sigma {
                row[j] += w;
            } else if variant.retains() {
                for (d, &q) in fresh.iter().enumerate() {
                    row[d] += w * q;
                }
            } else {
                row[0] += w;
            }
        }
    }
    p
}

/// Fraction of tuples landing entirely inside `0..i`.
pub fn enumerated_fp(bits: usize, hashes: usize, hash: HashVariant, i: usize) -> f64 {
    let all = tuples(bits, hashes, hash);
    all.iter().filter(|t| t.iter().all(|&x| x < i)).count() as f64 / all.len() as f64
}

/// Stationary distribution of `p` by power iteration on the lazy chain
/// `(P + I) / 2`, which has the same fixed point and cannot be periodic.
pub fn power_iteration(p: &[Vec<f64>]) -> Vec<f64> {
    let n = p.len();
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..1_000_000 {
        let mut next: Vec<f64> = pi.iter().map(|x| 0.5 * x).collect();
        for (x, row) in pi.iter().zip(p) {
            for (slot, q) in next.iter_mut().zip(row) {
                *slot += 0.5 * x * q;
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let diff = pi
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        pi = next;
        if diff < 1e-16 {
            break;
        }
    }
    pi
}

/// Every `(variant, M, k, σ)` with `M <= 12`, `k <= 3`, `σ <= 8`.
pub fn small_grid() -> Vec<(ModelVariant, usize, usize, usize)> {
    let mut out = Vec::new();
    for variant in ModelVariant::ALL {
        for m in 1..=12 {
            for k in 1..=3.min(m) {
                for sigma in 0..=8.min(m - 1) {
                    out.push((variant, m, k, sigma));
                }
            }
        }
    }
    out
}
