//! JSON description of graphons.
//!
//! ```json
//! {"type": "step", "masses": [1.0, 2.0], "values": [[0.5, 0.2], [0.2, 0.1]], "ambient_infinite": false}
//! {"type": "caron_fox", "f": {"kind": "shifted_power", "c": 1.0, "gamma": 2.0},
//!  "truncation": {"x_max": 10.0, "target_l1_residual": 0.01}}
//! {"type": "region_indicator", "boundary": {"kind": "power_involution", "a": 2.0},
//!  "truncation": {"x_max": 50.0}}
//! {"type": "infinite_block", "intervals": [[0, 1], [1, 3]], "probabilities": [[1, 0], [0, 0]],
//!  "truncation_count": 2}
//! {"type": "mixed_membership", "simplex": {"kind": "uniform", "k": 2},
//!  "components": {"kind": "step", "masses": [1.0], "values": [[[[0.5]], [[0.1]]], [[[0.1]], [[0.5]]]]}}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::analytic::{
    AnalyticGraphon, Boundary, Components, Family, IntervalBlocks, MixedMembership, PowerLaw,
    SimplexMeasure, TruncationSpec,
};
use super::step::StepGraphon;
use super::Graphon;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GraphonSpec {
    Step {
        masses: Vec<f64>,
        values: Vec<Vec<f64>>,
        #[serde(default)]
        ambient_infinite: bool,
    },
    CaronFox {
        f: PowerLaw,
        #[serde(default)]
        truncation: TruncationSpec,
    },
    RegionIndicator {
        boundary: Boundary,
        #[serde(default)]
        truncation: TruncationSpec,
    },
    InfiniteBlock {
        intervals: Vec<[f64; 2]>,
        probabilities: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        truncation_count: Option<usize>,
    },
    MixedMembership {
        simplex: SimplexMeasure,
        components: ComponentsSpec,
        #[serde(default)]
        truncation: TruncationSpec,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentsSpec {
    /// `values[k1][k2]` is the `n × n` matrix of component `W_{k1 k2}`.
    Step {
        masses: Vec<f64>,
        values: Vec<Vec<Vec<Vec<f64>>>>,
    },
    /// `f[k1][k2]` is the weight of component `W_{k1 k2}`.
    CaronFox { f: Vec<Vec<PowerLaw>> },
}

impl GraphonSpec {
    pub fn build(&self) -> Result<Graphon> {
        Ok(match self {
            GraphonSpec::Step {
                masses,
                values,
                ambient_infinite,
            } => Graphon::Step(StepGraphon::new(masses.clone(), values.clone(), *ambient_infinite)?),
            GraphonSpec::CaronFox { f, truncation } => {
                Graphon::Analytic(AnalyticGraphon::caron_fox(*f, *truncation)?)
            }
            GraphonSpec::RegionIndicator {
                boundary,
                truncation,
            } => Graphon::Analytic(AnalyticGraphon::region_indicator(*boundary, *truncation)?),
            GraphonSpec::InfiniteBlock {
                intervals,
                probabilities,
                truncation_count,
            } => {
                let blocks = IntervalBlocks::new(
                    intervals.iter().map(|&[a, b]| (a, b)).collect(),
                    probabilities.clone(),
                    *truncation_count,
                )?;
                Graphon::Analytic(AnalyticGraphon::infinite_block(blocks))
            }
            GraphonSpec::MixedMembership {
                simplex,
                components,
                truncation,
            } => {
                let k = simplex.dimension();
                let components = match components {
                    ComponentsSpec::Step { masses, values } => {
                        let n = masses.len();
                        let mut kernels = Vec::with_capacity(k * k);
                        check_grid(values.len(), values.iter().map(Vec::len), k)?;
                        for row in values {
                            for m in row {
                                if m.len() != n || m.iter().any(|r| r.len() != n) {
                                    return Err(Error::InvalidGraphon(format!(
                                        "component matrices must be {n}x{n}"
                                    )));
                                }
                                kernels.push(m.iter().flatten().copied().collect());
                            }
                        }
                        Components::Step {
                            masses: masses.clone(),
                            kernels,
                        }
                    }
                    ComponentsSpec::CaronFox { f } => {
                        check_grid(f.len(), f.iter().map(Vec::len), k)?;
                        Components::CaronFox {
                            f: f.iter().flatten().copied().collect(),
                        }
                    }
                };
                let mm = MixedMembership::new(simplex.clone(), components)?;
                Graphon::Analytic(AnalyticGraphon::mixed_membership(mm, *truncation)?)
            }
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graphon specs always serialize")
    }
}

fn check_grid(rows: usize, lens: impl Iterator<Item = usize>, k: usize) -> Result<()> {
    let mut ok = rows == k;
    for len in lens {
        ok &= len == k;
    }
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidGraphon(format!(
            "components must form a {k}x{k} grid"
        )))
    }
}

impl From<&StepGraphon> for GraphonSpec {
    fn from(w: &StepGraphon) -> Self {
        GraphonSpec::Step {
            masses: w.masses().to_vec(),
            values: w.values_matrix(),
            ambient_infinite: w.ambient_infinite(),
        }
    }
}

impl From<&AnalyticGraphon> for GraphonSpec {
    fn from(w: &AnalyticGraphon) -> Self {
        let truncation = TruncationSpec {
            x_max: Some(w.x_max()),
            target_l1_residual: None,
        };
        match w.family() {
            Family::CaronFox { f } => GraphonSpec::CaronFox { f: *f, truncation },
            Family::RegionIndicator { boundary } => GraphonSpec::RegionIndicator {
                boundary: *boundary,
                truncation,
            },
            Family::InfiniteBlock(blocks) => GraphonSpec::InfiniteBlock {
                intervals: blocks.all_intervals().iter().map(|&(a, b)| [a, b]).collect(),
                probabilities: blocks.probabilities(),
                truncation_count: Some(blocks.truncation_count()),
            },
            Family::MixedMembership(mm) => {
                let k = mm.k();
                let components = match mm.components() {
                    Components::Step { masses, kernels } => {
                        let n = masses.len();
                        ComponentsSpec::Step {
                            masses: masses.clone(),
                            values: (0..k)
                                .map(|k1| {
                                    (0..k)
                                        .map(|k2| {
                                            kernels[k1 * k + k2]
                                                .chunks(n.max(1))
                                                .map(<[f64]>::to_vec)
                                                .collect()
                                        })
                                        .collect()
                                })
                                .collect(),
                        }
                    }
                    Components::CaronFox { f } => ComponentsSpec::CaronFox {
                        f: f.chunks(k).map(<[PowerLaw]>::to_vec).collect(),
                    },
                };
                let truncation = match mm.components() {
                    Components::Step { .. } => TruncationSpec::default(),
                    Components::CaronFox { .. } => truncation,
                };
                GraphonSpec::MixedMembership {
                    simplex: mm.simplex().clone(),
                    components,
                    truncation,
                }
            }
        }
    }
}

impl From<&Graphon> for GraphonSpec {
    fn from(w: &Graphon) -> Self {
        match w {
            Graphon::Step(s) => s.into(),
            Graphon::Analytic(a) => a.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_step() {
        let spec = GraphonSpec::from_json(
            r#"{"type":"step","masses":[1.0,2.0],"values":[[0.5,0.2],[0.2,0.1]],"ambient_infinite":false}"#,
        )
        .unwrap();
        let w = spec.build().unwrap();
        assert!((w.l1_norm().value - 1.7).abs() < 1e-15);
    }

    #[test]
    fn reports_offending_entry() {
        let spec = GraphonSpec::from_json(
            r#"{"type":"step","masses":[1.0,-2.0],"values":[[0.5,0.2],[0.2,0.1]]}"#,
        )
        .unwrap();
        assert!(matches!(
            spec.build(),
            Err(Error::NonPositiveMass { index: 1, .. })
        ));
        let spec =
            GraphonSpec::from_json(r#"{"type":"step","masses":[1.0,1.0],"values":[[0.5,0.2],[0.3,0.1]]}"#)
                .unwrap();
        assert!(matches!(
            spec.build(),
            Err(Error::Asymmetric { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn parses_caron_fox() {
        let spec = GraphonSpec::from_json(
            r#"{"type":"caron_fox","f":{"kind":"shifted_power","c":1.0,"gamma":2.0},"truncation":{"x_max":10.0,"target_l1_residual":0.01}}"#,
        )
        .unwrap();
        let Graphon::Analytic(w) = spec.build().unwrap() else {
            panic!("expected analytic graphon")
        };
        assert!(w.x_max() >= 10.0);
        assert!(w.truncation().l1_residual <= 0.01);
    }

    #[test]
    fn mixed_membership_round_trip() {
        let text = r#"{"type":"mixed_membership","simplex":{"kind":"uniform","k":2},
            "components":{"kind":"step","masses":[1.0],"values":[[[[0.5]],[[0.1]]],[[[0.1]],[[0.5]]]]}}"#;
        let spec = GraphonSpec::from_json(text).unwrap();
        let w = spec.build().unwrap();
        let back = GraphonSpec::from(&w);
        assert_eq!(back, spec);
    }

    #[test]
    fn infinite_block_round_trip() {
        let spec = GraphonSpec::InfiniteBlock {
            intervals: vec![[0.0, 1.0], [1.0, 3.0]],
            probabilities: vec![vec![1.0, 0.0], vec![0.0, 0.0]],
            truncation_count: Some(2),
        };
        let w = spec.build().unwrap();
        assert_eq!(GraphonSpec::from(&w), spec);
        let parsed = GraphonSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(parsed, spec);
    }
}
