use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ensembles::{EnsembleSpec, EntryDist};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    DelocProfile,
    Smin,
    Distance,
    KernelLcd,
    Audits,
    SmallballSuite,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::DelocProfile => "deloc_profile",
            ExperimentKind::Smin => "smin",
            ExperimentKind::Distance => "distance",
            ExperimentKind::KernelLcd => "kernel_lcd",
            ExperimentKind::Audits => "audits",
            ExperimentKind::SmallballSuite => "smallball_suite",
        }
    }

    /// Parameters that must be present, with their expected shape.
    pub fn required(self) -> &'static [(&'static str, ParamShape)] {
        use ParamShape::*;
        match self {
            ExperimentKind::DelocProfile => &[("epsilon", Real), ("delta", Real)],
            ExperimentKind::Smin => &[("epsilon", Real)],
            ExperimentKind::Distance => &[("epsilon", Real)],
            ExperimentKind::KernelLcd => &[("epsilon", Real)],
            ExperimentKind::Audits => &[("epsilon", Real), ("delta", Real)],
            ExperimentKind::SmallballSuite => &[("t_grid", Grid), ("L", Real), ("C", Real)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamShape {
    Real,
    Grid,
}

/// A named parameter: a single real or an explicit grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Real(f64),
    Grid(Vec<f64>),
}

/// Known parameter names and shapes. Anything else is rejected.
const KNOWN_PARAMS: &[(&str, ParamShape)] = &[
    ("epsilon", ParamShape::Real),
    ("delta", ParamShape::Real),
    ("tau_grid", ParamShape::Grid),
    ("t_grid", ParamShape::Grid),
    ("L", ParamShape::Real),
    ("C", ParamShape::Real),
    ("c", ParamShape::Real),
    ("c0", ParamShape::Real),
    ("c1", ParamShape::Real),
    ("lambda0_re", ParamShape::Real),
    ("lambda0_im", ParamShape::Real),
    ("n_starts", ParamShape::Real),
];

/// One experiment run, as read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub ensemble: EnsembleSpec,
    #[serde(default)]
    pub parameters: BTreeMap<String, ParamValue>,
    pub trials: usize,
    pub base_seed: u64,
    pub output_path: String,
    /// Worker threads; the global pool when absent. Never changes results.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Law of the random vector in the distance experiment; defaults to the
    /// ensemble's entry law.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_dist: Option<EntryDist>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            Error::config(toml_error_path(&msg), msg)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("", e.to_string()))
    }

    /// Schema check: trial count, ensemble, and the parameters the chosen
    /// experiment reads.
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(Error::config("workers", "must be at least 1"));
        }
        if self.output_path.is_empty() {
            return Err(Error::config("output_path", "must be nonempty"));
        }
        self.ensemble.validate().map_err(|e| match e {
            Error::Validation { field, reason } => Error::config(format!("ensemble.{field}"), reason),
            other => Error::config("ensemble", other.to_string()),
        })?;
        if let Some(z) = &self.z_dist {
            z.validate()
                .map_err(|e| Error::config("z_dist", e.to_string()))?;
        }
        for (name, value) in &self.parameters {
            let path = format!("parameters.{name}");
            let shape = KNOWN_PARAMS
                .iter()
                .find(|(k, _)| k == name)
                .map(|(_, s)| *s)
                .ok_or_else(|| Error::config(&path, "unknown parameter"))?;
            check_shape(&path, value, shape)?;
        }
        for &(name, _) in self.experiment.required() {
            if !self.parameters.contains_key(name) {
                return Err(Error::config(format!("parameters.{name}"), "missing"));
            }
        }
        Ok(())
    }

    pub fn real(&self, name: &str) -> Result<f64> {
        match self.parameters.get(name) {
            Some(ParamValue::Real(x)) => Ok(*x),
            Some(ParamValue::Grid(_)) => Err(Error::config(format!("parameters.{name}"), "expected a real")),
            None => Err(Error::config(format!("parameters.{name}"), "missing")),
        }
    }

    pub fn real_or(&self, name: &str, default: f64) -> Result<f64> {
        if self.parameters.contains_key(name) {
            self.real(name)
        } else {
            Ok(default)
        }
    }

    pub fn grid(&self, name: &str) -> Result<Vec<f64>> {
        match self.parameters.get(name) {
            Some(ParamValue::Grid(g)) => Ok(g.clone()),
            Some(ParamValue::Real(_)) => Err(Error::config(format!("parameters.{name}"), "expected a grid")),
            None => Err(Error::config(format!("parameters.{name}"), "missing")),
        }
    }

    pub fn grid_or_empty(&self, name: &str) -> Result<Vec<f64>> {
        if self.parameters.contains_key(name) {
            self.grid(name)
        } else {
            Ok(Vec::new())
        }
    }
}

fn check_shape(path: &str, value: &ParamValue, shape: ParamShape) -> Result<()> {
    match (value, shape) {
        (ParamValue::Real(x), ParamShape::Real) if x.is_finite() => Ok(()),
        (ParamValue::Real(_), ParamShape::Real) => Err(Error::config(path, "must be finite")),
        (ParamValue::Grid(g), ParamShape::Grid) if g.iter().all(|x| x.is_finite()) => Ok(()),
        (ParamValue::Grid(_), ParamShape::Grid) => Err(Error::config(path, "grid entries must be finite")),
        (_, ParamShape::Real) => Err(Error::config(path, "expected a real")),
        (_, ParamShape::Grid) => Err(Error::config(path, "expected a grid")),
    }
}

/// Best-effort field path from a TOML deserialization message such as
/// "missing field `trials`".
fn toml_error_path(msg: &str) -> String {
    match (msg.find('`'), msg.rfind('`')) {
        (Some(a), Some(b)) if b > a => msg[a + 1..b].to_string(),
        _ => String::new(),
    }
}
