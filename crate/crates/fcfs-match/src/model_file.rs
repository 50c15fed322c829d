//! JSON model files.
//!
//! ```json
//! {
//!   "agents": [{"name": "c1", "alpha": 0.3}, ...],
//!   "goods": [{"name": "s1", "beta": 0.3}, ...],
//!   "edges": [["s1", "c1"], ...],
//!   "lambda_bar": 0.7,
//!   "mu_bar": 1.0
//! }
//! ```
//!
//! Edges are `[good, agent]` pairs. Declaration order is the canonical type
//! order used by every report.

use std::fs;
use std::path::Path;

use fcfs_match_core::{MatchingModel, ModelSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub agents: Vec<AgentEntry>,
    pub goods: Vec<GoodEntry>,
    pub edges: Vec<(String, String)>,
    pub lambda_bar: f64,
    pub mu_bar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentEntry {
    pub name: String,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoodEntry {
    pub name: String,
    pub beta: f64,
}

impl From<ModelSpec> for ModelFile {
    fn from(spec: ModelSpec) -> Self {
        Self {
            agents: spec
                .agents
                .into_iter()
                .map(|(name, alpha)| AgentEntry { name, alpha })
                .collect(),
            goods: spec
                .goods
                .into_iter()
                .map(|(name, beta)| GoodEntry { name, beta })
                .collect(),
            edges: spec.edges,
            lambda_bar: spec.lambda_bar,
            mu_bar: spec.mu_bar,
        }
    }
}

impl From<ModelFile> for ModelSpec {
    fn from(file: ModelFile) -> Self {
        Self {
            agents: file.agents.into_iter().map(|a| (a.name, a.alpha)).collect(),
            goods: file.goods.into_iter().map(|g| (g.name, g.beta)).collect(),
            edges: file.edges,
            lambda_bar: file.lambda_bar,
            mu_bar: file.mu_bar,
        }
    }
}

/// Parses and validates a model. `origin` only labels diagnostics.
pub fn parse_model(text: &str, origin: &Path) -> Result<MatchingModel, CliError> {
    let file: ModelFile = serde_json::from_str(text).map_err(|source| CliError::Parse {
        path: origin.to_path_buf(),
        source,
    })?;
    MatchingModel::new(file.into()).map_err(CliError::Invalid)
}

pub fn read_model(path: &Path) -> Result<MatchingModel, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_model(&text, path)
}

pub fn model_to_json(model: &MatchingModel) -> String {
    let file = ModelFile::from(model.to_spec());
    serde_json::to_string_pretty(&file).expect("model files always serialize")
}
