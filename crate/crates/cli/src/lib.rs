//! Scenario runner and verification battery behind the `objectiva` binary.

pub mod battery;
pub mod config;
pub mod scenarios;

use objectiva::{ComplexMatrix, Effect, State};
use serde::{Deserialize, Serialize};

pub use battery::{verify_all, BatteryOptions, BatteryReport};
pub use config::{ConfigError, ScenarioConfig, ScenarioKind};
pub use scenarios::{run, sample, ScenarioReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    State,
    Effect,
    /// Passes if the matrix is a state or an effect.
    Any,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub valid: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl<T> From<objectiva::Result<T>> for Verdict {
    fn from(r: objectiva::Result<T>) -> Self {
        Self { valid: r.is_ok(), error: r.err().map(|e| e.to_string()) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub dim: usize,
    pub expected: OperatorKind,
    pub state: Verdict,
    pub effect: Verdict,
    pub pass: bool,
}

pub fn validate_matrix(m: &ComplexMatrix, tolerance: f64, expected: OperatorKind) -> ValidationReport {
    let state = Verdict::from(State::with_tolerance(m.clone(), tolerance));
    let effect = Verdict::from(Effect::with_tolerance(m.clone(), tolerance));
    let pass = match expected {
        OperatorKind::State => state.valid,
        OperatorKind::Effect => effect.valid,
        OperatorKind::Any => state.valid || effect.valid,
    };
    ValidationReport { dim: m.dim(), expected, state, effect, pass }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_of_basic_operators() {
        let half = ComplexMatrix::identity(2).scale(0.5);
        let r = validate_matrix(&half, 1e-10, OperatorKind::Any);
        assert!(r.state.valid && r.effect.valid && r.pass);

        let twice = ComplexMatrix::identity(2).scale(2.0);
        let r = validate_matrix(&twice, 1e-10, OperatorKind::Any);
        assert!(!r.pass);
        assert!(r.effect.error.is_some());

        let id = ComplexMatrix::identity(2);
        assert!(!validate_matrix(&id, 1e-10, OperatorKind::State).pass);
        assert!(validate_matrix(&id, 1e-10, OperatorKind::Effect).pass);
    }
}
