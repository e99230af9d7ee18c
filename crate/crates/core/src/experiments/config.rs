use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graphon::{Graphon, GraphonSpec};

/// A graphon given inline or by the path of a spec file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphonSource {
    Path(PathBuf),
    Inline(GraphonSpec),
}

impl GraphonSource {
    /// Loads the spec; relative paths resolve against `base`.
    pub fn resolve(&self, base: Option<&Path>) -> Result<GraphonSpec> {
        match self {
            GraphonSource::Inline(spec) => Ok(spec.clone()),
            GraphonSource::Path(p) => {
                let path = match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p.clone(),
                };
                GraphonSpec::load(&path)
            }
        }
    }
}

/// One run of a catalog experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graphon: Option<GraphonSource>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub horizons: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sizes: Vec<usize>,
    pub replicas: usize,
    pub seed: u64,
    /// Directory receiving the CSV, JSON and SVG files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Experiment-specific parameters; see the catalog descriptions.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, Value>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// The configured graphon, or `default` when none is given.
    pub fn graphon_or(&self, default: GraphonSpec, base: Option<&Path>) -> Result<Graphon> {
        match &self.graphon {
            Some(src) => src.resolve(base)?.build(),
            None => default.build(),
        }
    }

    pub fn param_f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .ok_or_else(|| Error::InvalidConfig(format!("parameter `{key}` must be a number"))),
        }
    }

    pub fn param_usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v.as_u64().map(|x| x as usize).ok_or_else(|| {
                Error::InvalidConfig(format!("parameter `{key}` must be a nonnegative integer"))
            }),
        }
    }

    pub fn param_f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.params.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_f64().ok_or_else(|| {
                        Error::InvalidConfig(format!("parameter `{key}` must hold numbers"))
                    })
                })
                .collect(),
            Some(_) => Err(Error::InvalidConfig(format!(
                "parameter `{key}` must be an array of numbers"
            ))),
        }
    }

    pub fn param_str<'a>(&'a self, key: &str, default: &'a str) -> Result<&'a str> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_str()
                .ok_or_else(|| Error::InvalidConfig(format!("parameter `{key}` must be a string"))),
        }
    }

    /// Checks the parts every experiment relies on before any work starts.
    pub fn validate(&self, base: Option<&Path>) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::InvalidConfig("replica count must be at least 1".into()));
        }
        if let Some(h) = self.horizons.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidConfig(format!("horizon {h} must be positive")));
        }
        if let Some(src) = &self.graphon {
            src.resolve(base)?;
        }
        Ok(())
    }
}
