//! Arrival processes.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rbf_core::MessageId;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", rename_all_fields = "kebab-case", tag = "kind")]
pub enum Workload {
    /// Every arrival is drawn uniformly from a fixed set of `size` messages.
    UniformUniverse { size: u64 },
    /// With probability `p_repeat` an arrival repeats a message drawn
    /// uniformly from those seen so far in the epoch; otherwise it is a
    /// message never seen before.
    BernoulliRepeat { p_repeat: f64 },
}

impl Workload {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Workload::UniformUniverse { size: 0 } => Err(SimError::InvalidConfig(
                "universe size must be at least 1".into(),
            )),
            Workload::BernoulliRepeat { p_repeat } if !(0.0..1.0).contains(&p_repeat) => {
                Err(SimError::InvalidConfig(format!(
                    "p_repeat must lie in [0, 1) (got {p_repeat})"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn stream(&self, rng: ChaCha8Rng) -> Arrivals {
        Arrivals {
            workload: *self,
            rng,
            issued: 0,
        }
    }
}

/// Infinite iterator of message ids for one epoch.
#[derive(Debug, Clone)]
pub struct Arrivals {
    workload: Workload,
    rng: ChaCha8Rng,
    issued: u64,
}

impl Iterator for Arrivals {
    type Item = MessageId;

    fn next(&mut self) -> Option<MessageId> {
        let id = match self.workload {
            Workload::UniformUniverse { size } => self.rng.gen_range(0..size),
            Workload::BernoulliRepeat { p_repeat } => {
                if self.issued > 0 && self.rng.gen_bool(p_repeat) {
                    self.rng.gen_range(0..self.issued)
                } else {
                    self.issued += 1;
                    self.issued - 1
                }
            }
        };
        Some(MessageId(id))
    }
}
