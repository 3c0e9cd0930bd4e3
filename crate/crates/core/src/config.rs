//! Experiment configuration: strict JSON plus dotted `key=value` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analysis::AisConfig;
use crate::crossbar::ArrayOptions;
use crate::datasets::{DatasetMode, SIDE};
use crate::device::DeviceParams;
use crate::energy::ArrayWorkload;
use crate::error::{Error, Result};
use crate::rbm::TrainConfig;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    #[default]
    Train,
    SweepPatterns,
    SweepDevice,
    EnergyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Epochs at which pattern-sweep error rates are reported.
    pub checkpoints: Vec<usize>,
    pub n_patterns: Vec<usize>,
    pub sigma_c2c: Vec<f64>,
    pub n_levels: Vec<u32>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            checkpoints: vec![10, 30, 70],
            n_patterns: vec![2, 3, 4, 5, 8, 11, 14],
            sigma_c2c: vec![0.0, 0.3, 0.6],
            n_levels: vec![1, 10, 40, 100],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub trials: usize,
    /// Stored patterns for training and device sweeps.
    pub n_patterns: usize,
    pub dataset_mode: DatasetMode,
    pub n_hidden: usize,
    /// Also train the ideal-weight model under the same seeds.
    pub baseline: bool,
    /// Write a conductance snapshot of every synapse after every epoch.
    pub record_conductances: bool,
    pub device: DeviceParams,
    pub array: ArrayOptions,
    pub train: TrainConfig,
    pub ais: AisConfig,
    pub sweep: SweepConfig,
    pub workload: ArrayWorkload,
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::Train,
            seed: 2016,
            trials: 5,
            n_patterns: 5,
            dataset_mode: DatasetMode::Distinct,
            n_hidden: 5,
            baseline: true,
            record_conductances: true,
            device: DeviceParams::default(),
            array: ArrayOptions::default(),
            train: TrainConfig::default(),
            ais: AisConfig::default(),
            sweep: SweepConfig::default(),
            workload: ArrayWorkload::default(),
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn n_visible(&self) -> usize {
        SIDE * SIDE
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.n_hidden == 0 || self.n_hidden > crate::analysis::MAX_HIDDEN {
            return bad(format!("n_hidden must be in 1..={}", crate::analysis::MAX_HIDDEN));
        }
        let max_patterns = match self.dataset_mode {
            DatasetMode::Distinct => 14,
            DatasetMode::Sampler => usize::MAX,
        };
        for &n in std::iter::once(&self.n_patterns).chain(&self.sweep.n_patterns) {
            if n == 0 || n > max_patterns {
                return bad(format!("n_patterns {n} out of range for {:?} mode", self.dataset_mode));
            }
        }
        if self.sweep.checkpoints.is_empty() || self.sweep.sigma_c2c.is_empty() || self.sweep.n_levels.is_empty() {
            return bad("sweep grids must not be empty".into());
        }
        if self.sweep.sigma_c2c.iter().any(|s| !(*s >= 0.0)) || self.sweep.n_levels.contains(&0) {
            return bad("sweep values must be non-negative and n_levels at least 1".into());
        }
        self.device.validate()?;
        self.train.validate()?;
        self.ais.validate()?;
        if let Some(s) = self.array.s_norm_override {
            if !(s > 0.0) {
                return bad("array.s_norm_override must be positive".into());
            }
        }
        Ok(())
    }

    pub fn from_value(value: Value) -> Result<Self> {
        let config: Self = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_value(value)
    }

    /// Reads `path` (or starts from defaults) and applies `key=value` overrides.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut value = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
            }
            None => serde_json::to_value(Self::default())?,
        };
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        Self::from_value(value)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Sets `a.b.c=value` in a JSON tree. The value is parsed as JSON when
/// possible and taken as a string otherwise.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {assignment:?} is not key=value")))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(Error::Config(format!("bad override key {key:?}")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for part in &parts[..parts.len() - 1] {
        if !node.is_object() {
            *node = Value::Object(Default::default());
        }
        node = node
            .as_object_mut()
            .expect("just ensured object")
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    match node {
        Value::Object(map) => {
            map.insert(parts[parts.len() - 1].to_string(), value);
            Ok(())
        }
        _ => Err(Error::Config(format!("cannot set {key:?}: parent is not an object"))),
    }
}
