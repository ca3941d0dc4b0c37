//! Recycling Bloom filters (RBFs) and exact models of their long-run
//! average false-positive rate.
//!
//! A recycling Bloom filter clears itself once it is "full enough" and then
//! refills. This crate provides:
//!
//! - [`filter`]: executable one-phase and two-phase RBFs with ideal
//!   (independent, seeded) hashing, σ-bounded or N-bounded recycling, and
//!   retaining or non-retaining overflow handling.
//! - [`markov`]: the banded Markov chain over "bits set" for σ-bounded
//!   filters: transition tables, steady state, long-run false-positive rates
//!   for one- and two-phase filters, the `k = 1` closed form and the
//!   expected number of messages per cycle.
//! - [`bounds`]: the classic worst-case formula and the two N-bounded
//!   averages (oracle user, average-case lower bound), plus their inversion
//!   into message capacity.
//! - [`planner`]: capacity planning on top of the two models above.
//!
//! The crate is `no_std` and only needs `alloc`. Simulation, file formats and
//! the command line live in the companion `rbf-sim` crate.
//!
//! ```
//! use rbf_core::markov::{SigmaModel, ModelVariant};
//!
//! let model = SigmaModel::solve(ModelVariant::CollidingNonRetaining, 2, 1, 1).unwrap();
//! assert!((model.one_phase_fp() - 1.0 / 3.0).abs() < 1e-12);
//! ```
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bounds;
mod error;
pub mod filter;
pub mod hashing;
pub mod markov;
mod params;
pub mod planner;

pub use error::{Error, Result};
pub use filter::{InsertOutcome, RecyclingBloomFilter};
pub use hashing::{hash_indices, HashAssignment, IdealHasher, MessageId};
pub use params::{FilterParams, HashVariant, Phases, RecyclePolicy, Retention, TwoPhaseInsert};
