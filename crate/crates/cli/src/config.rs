//! Scenario descriptions shared by the subcommands and batch files.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::runner::CliError;

/// One fully specified run; together with its seed it determines the CSV output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub command: String,
    #[serde(default)]
    pub action: Option<String>,
    #[serde(default)]
    pub mesh: Option<String>,
    #[serde(default)]
    pub alpha: Option<String>,
    #[serde(default)]
    pub field: Option<String>,
    #[serde(default, rename = "L")]
    pub l: Option<String>,
    #[serde(default)]
    pub proj: Option<String>,
    #[serde(default)]
    pub res: Option<usize>,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub step: Option<f64>,
    #[serde(default)]
    pub radius: Option<f64>,
    /// Radius of the ball seeding the first Conley index pair.
    #[serde(default)]
    pub seed_radius: Option<f64>,
    #[serde(default)]
    pub levels: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub svg: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn new(command: &str) -> Self {
        ScenarioConfig { command: command.to_string(), ..Default::default() }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Batch {
    scenarios: Vec<ScenarioConfig>,
}

/// Parses a batch file: `{"scenarios": [...]}` with at least one entry.
pub fn parse_batch(text: &str) -> Result<Vec<ScenarioConfig>, CliError> {
    if text.trim().is_empty() {
        return Err(CliError::ConfigParse("empty config".into()));
    }
    let batch: Batch = serde_json::from_str(text).map_err(|e| CliError::ConfigParse(e.to_string()))?;
    if batch.scenarios.is_empty() {
        return Err(CliError::ConfigParse("no scenarios".into()));
    }
    for s in &batch.scenarios {
        if s.command.trim().is_empty() {
            return Err(CliError::ConfigParse("scenario without command".into()));
        }
    }
    Ok(batch.scenarios)
}
