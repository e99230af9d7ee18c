use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::Result;

/// One measured number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub replica: usize,
    /// Value of the swept parameter (horizon, size, ε, ...); 0 when nothing is swept.
    pub parameter: f64,
    pub metric: String,
    pub value: f64,
}

/// Summary of all records sharing a metric and parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub metric: String,
    pub parameter: f64,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub std_error: f64,
    pub min: f64,
    pub max: f64,
}

/// A declared tolerance and whether the recorded numbers meet it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub passed: bool,
}

impl Check {
    /// `lower ≤ observed ≤ upper`, each bound optional.
    pub fn within(name: impl Into<String>, observed: f64, lower: Option<f64>, upper: Option<f64>) -> Self {
        let passed = observed.is_finite()
            && lower.is_none_or(|l| observed >= l)
            && upper.is_none_or(|u| observed <= u);
        Self {
            name: name.into(),
            observed,
            lower,
            upper,
            passed,
        }
    }

    pub fn at_most(name: impl Into<String>, observed: f64, upper: f64) -> Self {
        Self::within(name, observed, None, Some(upper))
    }

    pub fn at_least(name: impl Into<String>, observed: f64, lower: f64) -> Self {
        Self::within(name, observed, Some(lower), None)
    }

    /// Strict lower bound: passes iff `observed > lower`.
    pub fn above(name: impl Into<String>, observed: f64, lower: f64) -> Self {
        let mut c = Self::at_least(name, observed, lower);
        c.passed = c.passed && observed > lower;
        c
    }

    /// Strict upper bound: passes iff `observed < upper`.
    pub fn below(name: impl Into<String>, observed: f64, upper: f64) -> Self {
        let mut c = Self::at_most(name, observed, upper);
        c.passed = c.passed && observed < upper;
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub records: Vec<Record>,
    pub aggregates: Vec<Aggregate>,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub environment: Environment,
}

impl ExperimentReport {
    pub fn new(config: &ExperimentConfig, records: Vec<Record>, checks: Vec<Check>) -> Self {
        let aggregates = aggregate(&records);
        let passed = checks.iter().all(|c| c.passed);
        Self {
            experiment: config.experiment.clone(),
            config: config.clone(),
            records,
            aggregates,
            checks,
            passed,
            environment: Environment {
                version: env!("CARGO_PKG_VERSION").to_string(),
                seed: config.seed,
            },
        }
    }

    pub fn aggregate_for(&self, metric: &str, parameter: f64) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.metric == metric && a.parameter == parameter)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Groups records by `(metric, parameter)` in order of first appearance.
pub fn aggregate(records: &[Record]) -> Vec<Aggregate> {
    let mut keys: Vec<(String, f64)> = Vec::new();
    for r in records {
        if !keys.iter().any(|(m, p)| *m == r.metric && *p == r.parameter) {
            keys.push((r.metric.clone(), r.parameter));
        }
    }
    keys.into_iter()
        .map(|(metric, parameter)| {
            let values: Vec<f64> = records
                .iter()
                .filter(|r| r.metric == metric && r.parameter == parameter)
                .map(|r| r.value)
                .collect();
            summarize(metric, parameter, &values)
        })
        .collect()
}

fn summarize(metric: String, parameter: f64, values: &[f64]) -> Aggregate {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let std_error = if n > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    Aggregate {
        metric,
        parameter,
        count: n,
        mean,
        median: median(values),
        std_error,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
