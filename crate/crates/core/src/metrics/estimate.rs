use serde::{Deserialize, Serialize};

use super::cutnorm::{cut_norm_weighted, CutNormMode};
use crate::error::{Error, Result};
use crate::graph::SampledGraph;
use crate::graphon::{GraphonSpec, StepGraphon};
use crate::sampling::ProcessTrace;

/// Cell counts up to which the estimate uses the exact cut norm.
pub const ESTIMATE_EXACT_CELLS: usize = 20;

/// How sampled vertices are assigned to the blocks of the reference graphon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alignment {
    /// Each vertex goes to the block containing its sampled feature.
    FeatureOracle,
    /// Vertices sorted by degree fill blocks sorted by graphon degree, in
    /// proportion to the block masses.
    DegreeSort,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    /// Upper bound on the stretched cut distance between the graph and the graphon.
    pub value: f64,
    /// Number of coupling cells the cut norm was taken over.
    pub cells: usize,
    /// False when the cut norm on the cells was found heuristically.
    pub exact: bool,
}

/// Upper bound on `δ_□^s(G̃_T, W)` for the graph at the horizon of `trace`.
///
/// The stretched canonical graphon of the graph is averaged over the vertex
/// classes given by `alignment`, and the averaged step kernel is compared
/// with `stretch(W)` under the coupling that glues class `b` to block `b`
/// along their common mass and sends the rest to the zero tail.
pub fn graph_graphon_distance_estimate(
    trace: &ProcessTrace,
    w: &StepGraphon,
    alignment: Alignment,
) -> Result<DistanceEstimate> {
    if let GraphonSpec::Step { masses, .. } = &trace.spec {
        if masses.len() != w.num_blocks() {
            return Err(Error::InvalidArgument(format!(
                "trace was sampled from a graphon with {} blocks, reference has {}",
                masses.len(),
                w.num_blocks()
            )));
        }
    }
    let g = trace.snapshot(trace.horizon, true)?;
    graph_step_distance_estimate(&g, w, alignment)
}

/// [`graph_graphon_distance_estimate`] on a graph. Feature alignment needs
/// one-dimensional vertex features.
pub fn graph_step_distance_estimate(
    g: &SampledGraph,
    w: &StepGraphon,
    alignment: Alignment,
) -> Result<DistanceEstimate> {
    let k = w.num_blocks();
    let class = match alignment {
        Alignment::FeatureOracle => feature_classes(g, w)?,
        Alignment::DegreeSort => degree_classes(g, w),
    };
    let mut counts = vec![0usize; k];
    for c in class.iter().flatten() {
        counts[*c] += 1;
    }
    let mut edges = vec![0usize; k * k];
    for (u, v) in g.edges() {
        if let (Some(a), Some(b)) = (class[u], class[v]) {
            edges[a * k + b] += 1;
            if a != b {
                edges[b * k + a] += 1;
            }
        }
    }
    let m = g.num_edges();
    let vertex_mass = if m == 0 {
        0.0
    } else {
        1.0 / (2.0 * m as f64).sqrt()
    };
    let averaged = |a: usize, b: usize| {
        let (ca, cb) = (counts[a] as f64, counts[b] as f64);
        if ca == 0.0 || cb == 0.0 {
            0.0
        } else if a == b {
            2.0 * edges[a * k + a] as f64 / (ca * ca)
        } else {
            edges[a * k + b] as f64 / (ca * cb)
        }
    };
    let norm = w.l1_norm();
    let scale = if norm > 0.0 { norm.powf(-0.5) } else { 0.0 };

    // (graph class, graphon block, mass)
    let mut cells: Vec<(Option<usize>, Option<usize>, f64)> = Vec::new();
    for b in 0..k {
        let left = counts[b] as f64 * vertex_mass;
        let right = w.masses()[b] * scale;
        let common = left.min(right);
        for cell in [
            (Some(b), Some(b), common),
            (Some(b), None, left - common),
            (None, Some(b), right - common),
        ] {
            if cell.2 > 0.0 {
                cells.push(cell);
            }
        }
    }
    let n = cells.len();
    let mut diff = Vec::with_capacity(n * n);
    for &(la, ra, ma) in &cells {
        for &(lb, rb, mb) in &cells {
            let x = match (la, lb) {
                (Some(a), Some(b)) => averaged(a, b),
                _ => 0.0,
            };
            let y = match (ra, rb) {
                (Some(a), Some(b)) => w.value(a, b),
                _ => 0.0,
            };
            diff.push((x - y) * ma * mb);
        }
    }
    let mode = if n <= ESTIMATE_EXACT_CELLS {
        CutNormMode::Exact
    } else {
        CutNormMode::Heuristic
    };
    let c = cut_norm_weighted(&diff, n, mode, 0)?;
    Ok(DistanceEstimate {
        value: c.value,
        cells: n,
        exact: c.exact,
    })
}

fn feature_classes(g: &SampledGraph, w: &StepGraphon) -> Result<Vec<Option<usize>>> {
    let features = g.features().ok_or_else(|| {
        Error::InvalidArgument("feature alignment needs vertex features".into())
    })?;
    features
        .iter()
        .map(|f| match f.as_slice() {
            [x] => Ok(w.block_at(*x)),
            _ => Err(Error::InvalidArgument(
                "feature alignment needs one-dimensional features".into(),
            )),
        })
        .collect()
}

fn degree_classes(g: &SampledGraph, w: &StepGraphon) -> Vec<Option<usize>> {
    let n = g.num_vertices();
    let k = w.num_blocks();
    let mut class = vec![None; n];
    if k == 0 || n == 0 {
        return class;
    }
    let total = w.total_mass();
    let quotas: Vec<f64> = w.masses().iter().map(|m| m / total * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut rest: Vec<usize> = (0..k).collect();
    rest.sort_by(|&a, &b| {
        let (ra, rb) = (quotas[a] - quotas[a].floor(), quotas[b] - quotas[b].floor());
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let missing = n - counts.iter().sum::<usize>();
    for &b in rest.iter().take(missing) {
        counts[b] += 1;
    }
    let d = w.degrees();
    let mut blocks: Vec<usize> = (0..k).collect();
    blocks.sort_by(|&a, &b| d[b].total_cmp(&d[a]).then(a.cmp(&b)));
    let mut vertices: Vec<usize> = (0..n).collect();
    vertices.sort_by(|&u, &v| g.degree(v).cmp(&g.degree(u)).then(u.cmp(&v)));
    let mut it = vertices.into_iter();
    for b in blocks {
        for v in it.by_ref().take(counts[b]) {
            class[v] = Some(b);
        }
    }
    class
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::Graphon;
    use crate::sampling::sample_graphon_process;

    #[test]
    fn complete_graph_is_close_to_constant_one() {
        let w = StepGraphon::constant(1.0, 1.0).unwrap();
        let trace = sample_graphon_process(&Graphon::from(w.clone()), 200.0, 3, true).unwrap();
        for alignment in [Alignment::FeatureOracle, Alignment::DegreeSort] {
            let e = graph_graphon_distance_estimate(&trace, &w, alignment).unwrap();
            // only the diagonal and the mass mismatch remain
            assert!(e.value < 0.02, "{alignment:?}: {}", e.value);
        }
    }

    #[test]
    fn edgeless_graph_is_at_unit_distance() {
        let w = StepGraphon::new(vec![1.0, 2.0], vec![vec![0.5, 0.2], vec![0.2, 0.1]], false)
            .unwrap();
        let g = SampledGraph::empty(0);
        let e = graph_step_distance_estimate(&g, &w, Alignment::DegreeSort).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_block_count_mismatch() {
        let w = StepGraphon::constant(1.0, 0.5).unwrap();
        let trace = sample_graphon_process(&Graphon::from(w), 5.0, 1, true).unwrap();
        let other = StepGraphon::from_flat(vec![0.5, 0.5], vec![0.5; 4], false).unwrap();
        assert!(graph_graphon_distance_estimate(&trace, &other, Alignment::FeatureOracle).is_err());
    }
}
