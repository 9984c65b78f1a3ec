use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rng::substream_seed;

/// One trial of an experiment. Maps are ordered so serialization is stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub seed: u64,
    pub metrics: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
    pub wall_time_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn failed(&self) -> bool {
        self.flags.get("failed").copied().unwrap_or(false)
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }

    pub fn flag(&self, name: &str) -> Option<bool> {
        self.flags.get(name).copied()
    }

    /// Copy with the timing field zeroed, for content comparisons.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_time_ms: 0,
            ..self.clone()
        }
    }
}

/// Metrics and flags produced by one trial body.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrialOutcome {
    pub metrics: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
}

impl TrialOutcome {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn metric(mut self, name: &str, value: f64) -> Self {
        self.metrics.insert(name.to_string(), value);
        self
    }

    pub fn flag(mut self, name: &str, value: bool) -> Self {
        self.flags.insert(name.to_string(), value);
        self
    }
}

/// Runs `trials` independent trials on the current rayon pool.
///
/// Trial `i` receives `substream_seed(base_seed, i)`. Errors and non-finite
/// metrics turn into records flagged `failed` instead of aborting the run.
/// Output is in trial order and independent of the worker count.
pub fn run_trials<F>(trials: usize, base_seed: u64, body: F) -> Vec<TrialRecord>
where
    F: Fn(u64, u64) -> Result<TrialOutcome> + Sync,
{
    (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let seed = substream_seed(base_seed, i);
            let start = Instant::now();
            let result = body(i, seed);
            let wall_time_ms = start.elapsed().as_millis() as u64;
            let (metrics, mut flags, error) = match result {
                Ok(out) => match out.metrics.iter().find(|(_, v)| !v.is_finite()) {
                    Some((k, v)) => (
                        BTreeMap::new(),
                        BTreeMap::new(),
                        Some(format!("metric {k} is not finite ({v})")),
                    ),
                    None => (out.metrics, out.flags, None),
                },
                Err(e) => (BTreeMap::new(), BTreeMap::new(), Some(e.to_string())),
            };
            flags.insert("failed".to_string(), error.is_some());
            TrialRecord {
                trial_index: i,
                seed,
                metrics,
                flags,
                wall_time_ms,
                error,
            }
        })
        .collect()
}
