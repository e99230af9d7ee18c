use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators;
use crate::graph::SampledGraph;
use crate::rng::derive_seed;

/// A named graph family swept over sizes, e.g. `er_example1:alpha=0.5:n=1000,2000`.
///
/// Families:
/// - `er_example1:alpha=a:n=...`: Erdős–Rényi with edge probability `n^{a−1}`
/// - `clique_example1:n=...`: clique on `⌊n^{3/4}⌋` vertices plus isolated vertices
/// - `matching:m=...`: perfect matching with `m` edges
/// - `cycle:n=...`, `complete:n=...`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFamily {
    pub kind: FamilyKind,
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    ErExample1 { alpha: f64 },
    CliqueExample1,
    Matching,
    Cycle,
    Complete,
}

/// One member of a family.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub id: String,
    pub size: usize,
    pub graph: SampledGraph,
}

impl GraphFamily {
    pub fn parse(text: &str) -> Result<Self> {
        let mut parts = text.split(':');
        let name = parts.next().unwrap_or_default().trim();
        let mut alpha = None;
        let mut sizes = None;
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("expected key=value in `{part}`")))?;
            match key.trim() {
                "alpha" => {
                    alpha = Some(value.trim().parse::<f64>().map_err(|_| {
                        Error::InvalidArgument(format!("bad alpha `{value}`"))
                    })?)
                }
                "n" | "m" => {
                    sizes = Some(
                        value
                            .split(',')
                            .map(|s| {
                                s.trim().parse::<usize>().map_err(|_| {
                                    Error::InvalidArgument(format!("bad size `{s}`"))
                                })
                            })
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown family parameter `{other}`"
                    )))
                }
            }
        }
        let kind = match name {
            "er_example1" => {
                let alpha = alpha.ok_or_else(|| {
                    Error::InvalidArgument("er_example1 needs alpha=...".into())
                })?;
                if !(alpha > 0.0 && alpha <= 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "alpha must lie in (0, 1], got {alpha}"
                    )));
                }
                FamilyKind::ErExample1 { alpha }
            }
            "clique_example1" => FamilyKind::CliqueExample1,
            "matching" => FamilyKind::Matching,
            "cycle" => FamilyKind::Cycle,
            "complete" => FamilyKind::Complete,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown graph family `{other}`"
                )))
            }
        };
        let sizes = sizes
            .filter(|s| !s.is_empty())
            .ok_or_else(|| Error::InvalidArgument(format!("family `{name}` needs sizes")))?;
        Ok(Self { kind, sizes })
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FamilyKind::ErExample1 { .. } => "er_example1",
            FamilyKind::CliqueExample1 => "clique_example1",
            FamilyKind::Matching => "matching",
            FamilyKind::Cycle => "cycle",
            FamilyKind::Complete => "complete",
        }
    }

    /// Builds the member of size `n`; random families use `seed` and `n`.
    pub fn member(&self, n: usize, seed: u64) -> SampledGraph {
        match self.kind {
            FamilyKind::ErExample1 { alpha } => {
                let p = (n as f64).powf(alpha - 1.0).min(1.0);
                generators::erdos_renyi(n, p, derive_seed(seed, &[n as u64]))
            }
            FamilyKind::CliqueExample1 => generators::clique_plus_isolated(n, sparse_clique_size(n)),
            FamilyKind::Matching => generators::perfect_matching(n),
            FamilyKind::Cycle => generators::cycle(n),
            FamilyKind::Complete => generators::complete(n),
        }
    }

    pub fn members(&self, seed: u64) -> Vec<FamilyMember> {
        self.sizes
            .iter()
            .map(|&n| FamilyMember {
                id: format!("{}_{n}", self.name()),
                size: n,
                graph: self.member(n, seed),
            })
            .collect()
    }
}

/// `⌊n^{3/4}⌋`, robust to rounding at perfect powers.
pub fn sparse_clique_size(n: usize) -> usize {
    ((n as f64).powf(0.75) + 1e-9).floor() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_families() {
        let f = GraphFamily::parse("er_example1:alpha=0.5:n=1000,2000,4000").unwrap();
        assert_eq!(f.kind, FamilyKind::ErExample1 { alpha: 0.5 });
        assert_eq!(f.sizes, vec![1000, 2000, 4000]);
        assert_eq!(GraphFamily::parse("matching:m=10").unwrap().sizes, vec![10]);
        assert!(GraphFamily::parse("er_example1:n=10").is_err());
        assert!(GraphFamily::parse("nope:n=10").is_err());
        assert!(GraphFamily::parse("cycle").is_err());
    }

    #[test]
    fn clique_sizes() {
        assert_eq!(sparse_clique_size(10_000), 1000);
        assert_eq!(sparse_clique_size(1000), 177);
        let g = GraphFamily::parse("clique_example1:n=16").unwrap().member(16, 0);
        assert_eq!(g.num_vertices(), 16);
        assert_eq!(g.num_edges(), 8 * 7 / 2);
    }
}
