use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SampledGraph;
use crate::graphon::Graphon;
use crate::rng::{derive_seed, pair_uniform, stream_rng};

/// Growth of the arrival windows `S_n = [0, s_n]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionSchedule {
    /// `s_n = c n`
    Linear { c: f64 },
    /// `s_n = c 2^n`
    Exponential { c: f64 },
    /// `s_n = c`
    Constant { c: f64 },
}

impl RegionSchedule {
    /// Right end of `S_n` for arrival step `n ≥ 1`.
    pub fn extent(&self, n: usize) -> f64 {
        match *self {
            RegionSchedule::Linear { c } => c * n as f64,
            RegionSchedule::Exponential { c } => c * 2f64.powi(n.min(1023) as i32),
            RegionSchedule::Constant { c } => c,
        }
    }
}

/// Projective sequence `G_1 ⊂ G_2 ⊂ … ⊂ G_N` of the sequential arrival model.
///
/// Vertex `n` arrives with a feature drawn uniformly from `S_n` and joins each
/// earlier vertex independently with probability `W`. `G_n` is the induced
/// subgraph on the first `n` arrivals.
#[derive(Debug, Clone, PartialEq)]
pub struct SequentialSample {
    features: Vec<f64>,
    /// `(earlier, later)` arrival indices, sorted by the later endpoint.
    edges: Vec<(usize, usize)>,
}

impl SequentialSample {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    /// Number of edges of `G_n`.
    pub fn num_edges_at(&self, n: usize) -> usize {
        self.edges.partition_point(|&(_, later)| later < n)
    }

    /// `G_n`, the graph after `n` arrivals.
    pub fn graph_at(&self, n: usize) -> SampledGraph {
        let n = n.min(self.len());
        let edges = &self.edges[..self.num_edges_at(n)];
        let mut g = SampledGraph::from_edges(n, edges).expect("sampler emits simple edges");
        g = g.with_labels((1..=n as u64).collect()).expect("labels are unique");
        g
    }

    /// `G_n` for each requested `n`.
    pub fn graphs(&self, steps: &[usize]) -> Vec<SampledGraph> {
        steps.iter().map(|&n| self.graph_at(n)).collect()
    }
}

/// Runs `steps` arrivals of the sequential model on a graphon over ℝ₊.
pub fn sample_sequential(
    w: &Graphon,
    schedule: RegionSchedule,
    steps: usize,
    seed: u64,
) -> Result<SequentialSample> {
    if w.feature_dim() != 1 {
        return Err(Error::InvalidArgument(
            "sequential arrivals need a graphon over ℝ₊".into(),
        ));
    }
    w.check_probability_valued()?;
    let mut rng = stream_rng(seed, 0);
    let edge_seed = derive_seed(seed, &[1]);
    let mut features = Vec::with_capacity(steps);
    let mut edges = Vec::new();
    for n in 1..=steps {
        let s = schedule.extent(n);
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "arrival window S_{n} has mass {s}"
            )));
        }
        let x = rand::Rng::random::<f64>(&mut rng) * s;
        let later = n - 1;
        for (earlier, &y) in features.iter().enumerate() {
            let p = w.evaluate(&[x], &[y]);
            if p > 0.0 && pair_uniform(edge_seed, earlier as u64, later as u64) < p {
                edges.push((earlier, later));
            }
        }
        features.push(x);
    }
    Ok(SequentialSample { features, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::StepGraphon;

    #[test]
    fn zero_graphon_stays_edgeless() {
        let w: Graphon = StepGraphon::constant(1.0, 0.0).unwrap().into();
        let s = sample_sequential(&w, RegionSchedule::Linear { c: 1.0 }, 200, 3).unwrap();
        assert_eq!(s.num_edges_at(200), 0);
    }

    #[test]
    fn prefixes_are_induced() {
        let w: Graphon = StepGraphon::constant(1.0, 0.7).unwrap().into();
        let s = sample_sequential(&w, RegionSchedule::Constant { c: 1.0 }, 40, 5).unwrap();
        let big = s.graph_at(40);
        let small = s.graph_at(25);
        assert_eq!(big.induced(&(0..25).collect::<Vec<_>>()), small);
    }

    #[test]
    fn rejects_empty_window() {
        let w: Graphon = StepGraphon::constant(1.0, 0.7).unwrap().into();
        assert!(sample_sequential(&w, RegionSchedule::Constant { c: 0.0 }, 3, 5).is_err());
    }
}
