//! Multi-epoch experiments.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rbf_core::bounds::BoundReport;
use rbf_core::markov::{CapacityConvention, ModelVariant, SigmaModel};
use rbf_core::{FilterParams, Phases, RecyclePolicy, Retention};
use serde::{Deserialize, Serialize};

use crate::epoch::{run_epoch_inner, EpochStats, TraceOptions};
use crate::error::{Result, SimError};
use crate::stats::RateSummary;
use crate::workload::Workload;

fn default_level() -> f64 {
    0.99
}

/// An experiment: also the JSON config format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub filter: FilterParams,
    pub workload: Workload,
    pub epochs: usize,
    pub arrivals: u64,
    pub seed: u64,
    #[serde(default = "default_level")]
    pub confidence_level: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceOptions>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.filter.validate()?;
        self.workload.validate()?;
        if self.arrivals == 0 {
            return Err(SimError::InvalidConfig("arrivals must be at least 1".into()));
        }
        if !(self.confidence_level > 0.0 && self.confidence_level < 1.0) {
            return Err(SimError::InvalidConfig(format!(
                "confidence level must lie in (0, 1) (got {})",
                self.confidence_level
            )));
        }
        Ok(())
    }
}

/// An analytic value the simulated count-instance rate can be compared to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SimulationReport {
    pub config: ExperimentConfig,
    pub epochs: Vec<EpochStats>,
    pub count_instance: RateSummary,
    pub count_first: RateSummary,
    pub count_each: RateSummary,
    pub predictions: Vec<Prediction>,
}

/// Seed of epoch `index`: the first word of stream `index` of a generator
/// keyed by `master`.
pub fn epoch_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

/// Runs every epoch (in parallel; results do not depend on scheduling) and
/// summarizes them.
pub fn run_experiment(config: &ExperimentConfig) -> Result<SimulationReport> {
    config.validate()?;
    let epochs = (0..config.epochs as u64)
        .into_par_iter()
        .map(|i| {
            run_epoch_inner(
                &config.filter,
                &config.workload,
                config.arrivals,
                epoch_seed(config.seed, i),
                config.trace,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = |f: fn(&EpochStats) -> f64| {
        let xs: Vec<f64> = epochs.iter().map(f).collect();
        RateSummary::from_samples(&xs, config.confidence_level)
    };
    Ok(SimulationReport {
        count_instance: summary(|e| e.rate_count_instance)?,
        count_first: summary(|e| e.rate_count_first)?,
        count_each: summary(|e| e.rate_count_each)?,
        predictions: predictions(&config.filter)?,
        epochs,
        config: config.clone(),
    })
}

/// Analytic values matching `params`, where a model exists:
///
/// - σ-bounded, one phase: `f_sigma_1` (and `expected_messages` when
///   non-retaining).
/// - σ-bounded, two phases, non-retaining: `f_sigma_2` on `floor(M/2)` bits,
///   with its active-array term `f_sigma_1` and `expected_messages`.
/// - N-bounded, one phase: `f_w` of the last insertion of a cycle, `f_o`
///   and `f_a` (the latter omitted when it is undefined).
pub fn predictions(params: &FilterParams) -> Result<Vec<Prediction>> {
    let p = |name: &str, value: f64| Prediction {
        name: name.to_string(),
        value,
    };
    let variant = ModelVariant::new(params.hash_variant, params.retention);
    let bits = params.array_bits();
    let mut out = Vec::new();
    match (params.recycle, params.phases) {
        (RecyclePolicy::SigmaBounded { sigma }, Phases::One) => {
            let model = SigmaModel::solve(variant, bits, params.hashes, sigma)?;
            out.push(p("f_sigma_1", model.one_phase_fp()));
            if params.retention == Retention::NonRetaining {
                out.push(p("expected_messages", model.expected_capacity(CapacityConvention::Strict)?));
            }
        }
        (RecyclePolicy::SigmaBounded { sigma }, Phases::Two) => {
            if params.retention == Retention::NonRetaining {
                let model = SigmaModel::solve(variant, bits, params.hashes, sigma)?;
                out.push(p("f_sigma_2", model.two_phase_fp()?));
                out.push(p("f_sigma_1", model.one_phase_fp()));
                out.push(p("expected_messages", model.expected_capacity(CapacityConvention::Strict)?));
            }
        }
        (RecyclePolicy::NBounded { limit, .. }, Phases::One) => {
            out.push(p(
                "f_w",
                rbf_core::bounds::worst_case_fp(bits, params.hashes, limit - 1),
            ));
            match BoundReport::compute(bits, params.hashes, limit, false) {
                Ok(r) => {
                    out.push(p("f_o", r.oracle));
                    out.push(p("f_a", r.average_case));
                }
                Err(rbf_core::Error::DegenerateBound { .. }) => {
                    out.push(p("f_o", rbf_core::bounds::oracle_avg_fp(bits, params.hashes, limit)));
                }
                Err(e) => return Err(e.into()),
            }
        }
        (RecyclePolicy::NBounded { .. }, Phases::Two) => {}
    }
    Ok(out)
}

impl SimulationReport {
    pub fn prediction(&self, name: &str) -> Option<f64> {
        self.predictions.iter().find(|p| p.name == name).map(|p| p.value)
    }
}
