//! Scenario configuration files.

use std::fmt;
use std::path::Path;

use objectiva::superposition::uniform_phases;
use objectiva::{ComplexMatrix, DEFAULT_TOLERANCE};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Fig1aInterference,
    Fig1bCoincidence,
    Fig1cReduction,
    SternGerlach,
    Custom,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::Fig1aInterference,
        ScenarioKind::Fig1bCoincidence,
        ScenarioKind::Fig1cReduction,
        ScenarioKind::SternGerlach,
        ScenarioKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Fig1aInterference => "fig1a_interference",
            ScenarioKind::Fig1bCoincidence => "fig1b_coincidence",
            ScenarioKind::Fig1cReduction => "fig1c_reduction",
            ScenarioKind::SternGerlach => "stern_gerlach",
            ScenarioKind::Custom => "custom",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Explicit phase list, or `{"uniform": n}` for `2 pi k / n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhasePlan {
    List(Vec<f64>),
    Uniform { uniform: usize },
}

impl Default for PhasePlan {
    fn default() -> Self {
        PhasePlan::Uniform { uniform: 8 }
    }
}

impl PhasePlan {
    pub fn phases(&self) -> Vec<f64> {
        match self {
            PhasePlan::List(v) => v.clone(),
            PhasePlan::Uniform { uniform } => uniform_phases(*uniform),
        }
    }
}

/// Branch states and channel dimensions of a user-defined arrangement.
/// Every channel uses the pointers `|0>` for the first branch and `|1>`
/// for the second.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomArrangement {
    pub x1: ComplexMatrix,
    pub x2: ComplexMatrix,
    pub channel_dims: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    /// Branch weights of the sampled and fringe-table states.
    #[serde(default = "default_weights")]
    pub weights: (f64, f64),
    /// `w1` values swept by the verification grid.
    #[serde(default = "default_weight_grid")]
    pub weight_grid: Vec<f64>,
    #[serde(default = "default_coherence_grid")]
    pub coherence_grid: Vec<f64>,
    #[serde(default)]
    pub phase_grid: PhasePlan,
    #[serde(default)]
    pub detector_noise: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Coherence and phase of the member that `sample` draws from.
    #[serde(default = "default_sample_coherence")]
    pub sample_coherence: f64,
    #[serde(default)]
    pub sample_phase: f64,
    /// Weight `<phi1|A|phi1>` added to the coincidence effect of the
    /// two-arm detector arrangement, to watch its precondition check fail.
    #[serde(default)]
    pub coincidence_leak: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<CustomArrangement>,
}

fn default_weights() -> (f64, f64) {
    (0.5, 0.5)
}

fn default_weight_grid() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 0.75, 1.0]
}

fn default_coherence_grid() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 0.75, 1.0]
}

fn default_trials() -> usize {
    10_000
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

fn default_sample_coherence() -> f64 {
    1.0
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl ScenarioConfig {
    pub fn new(scenario: ScenarioKind) -> Self {
        Self {
            scenario,
            weights: default_weights(),
            weight_grid: default_weight_grid(),
            coherence_grid: default_coherence_grid(),
            phase_grid: PhasePlan::default(),
            detector_noise: 0.0,
            trials: default_trials(),
            seed: 0,
            tolerance: default_tolerance(),
            sample_coherence: default_sample_coherence(),
            sample_phase: 0.0,
            coincidence_leak: 0.0,
            custom: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |msg: String| Err(ConfigError::Invalid(msg));
        let (w1, w2) = self.weights;
        if !(0.0..=1.0).contains(&w1) || !(0.0..=1.0).contains(&w2) || (w1 + w2 - 1.0).abs() > self.tolerance {
            return invalid(format!("weights ({w1}, {w2}) must be in [0, 1] and sum to 1"));
        }
        if self.weight_grid.is_empty() || self.coherence_grid.is_empty() || self.phase_grid.phases().is_empty() {
            return invalid("grids must be nonempty".into());
        }
        if let Some(w) = self.weight_grid.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return invalid(format!("weight grid entry {w} outside [0, 1]"));
        }
        let coherence_ok = |c: &f64| (0.0..=1.0).contains(c);
        if let Some(c) = self.coherence_grid.iter().find(|c| !coherence_ok(c)) {
            return invalid(format!("coherence grid entry {c} outside [0, 1]"));
        }
        if !coherence_ok(&self.sample_coherence) {
            return invalid(format!("sample coherence {} outside [0, 1]", self.sample_coherence));
        }
        if self.phase_grid.phases().iter().chain([&self.sample_phase]).any(|p| !p.is_finite()) {
            return invalid("phases must be finite".into());
        }
        if !(0.0..=1.0).contains(&self.detector_noise) {
            return invalid(format!("detector noise {} outside [0, 1]", self.detector_noise));
        }
        if !(0.0..=1.0).contains(&self.coincidence_leak) {
            return invalid(format!("coincidence leak {} outside [0, 1]", self.coincidence_leak));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return invalid(format!("tolerance {} must be positive", self.tolerance));
        }
        match (&self.custom, self.scenario) {
            (None, ScenarioKind::Custom) => invalid("custom scenario needs a \"custom\" section".into()),
            (Some(c), ScenarioKind::Custom) if c.channel_dims.len() < 2 || c.channel_dims.iter().any(|&d| d < 2) => {
                invalid("custom arrangement needs at least two channels of dimension >= 2".into())
            }
            _ => Ok(()),
        }
    }

    /// Hex SHA-256 of the canonical JSON form after defaults and overrides.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}
