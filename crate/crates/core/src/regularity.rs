//! Tail-regularity and upper-regularity diagnostics for sparse graph sequences.
//!
//! A sequence has uniformly regular tails when, for every `ε`, some `M`
//! makes the top `⌈M√|E|⌉` vertices by degree carry all but `ε|E|` of the
//! degree mass in every graph of the sequence.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SampledGraph;

/// Smallest and largest `M` tried by [`sequence_tail_regularity`].
pub const M_GRID_START: f64 = 0.1;
pub const M_GRID_END: f64 = 100.0;
pub const M_GRID_RATIO: f64 = 1.25;

/// `0.1 · 1.25^j` up to 100.
pub fn m_grid() -> Vec<f64> {
    let mut grid = Vec::new();
    let mut j = 0;
    loop {
        let m = M_GRID_START * M_GRID_RATIO.powi(j);
        if m > M_GRID_END * (1.0 + 1e-12) {
            break;
        }
        grid.push(m);
        j += 1;
    }
    grid
}

/// Degree share `Σ_{i ≤ ⌈M√|E|⌉} deg(i) / |E|` of the top vertices, per `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailProfile {
    pub num_vertices: usize,
    pub num_edges: usize,
    pub m_values: Vec<f64>,
    /// Number of top vertices kept at each `M`.
    pub prefix_sizes: Vec<usize>,
    /// Degree share at each `M`; equals 2 once every non-isolated vertex is kept.
    pub shares: Vec<f64>,
}

/// Vertex indices sorted by degree descending, ties by label ascending.
pub fn degree_order(g: &SampledGraph) -> Vec<usize> {
    let labels = g.labels();
    let mut order: Vec<usize> = (0..g.num_vertices()).collect();
    order.sort_by(|&u, &v| {
        g.degree(v)
            .cmp(&g.degree(u))
            .then(labels[u].cmp(&labels[v]))
    });
    order
}

pub fn graph_tail_profile(g: &SampledGraph, m_values: &[f64]) -> Result<TailProfile> {
    let e = g.num_edges();
    if e == 0 {
        return Err(Error::EmptyGraph);
    }
    let order = degree_order(g);
    let mut prefix = Vec::with_capacity(order.len() + 1);
    let mut acc = 0usize;
    prefix.push(0);
    for &v in &order {
        acc += g.degree(v);
        prefix.push(acc);
    }
    let root = (e as f64).sqrt();
    let mut prefix_sizes = Vec::with_capacity(m_values.len());
    let mut shares = Vec::with_capacity(m_values.len());
    for &m in m_values {
        if !(m >= 0.0) {
            return Err(Error::InvalidArgument(format!("M must be nonnegative, got {m}")));
        }
        let p = ((m * root).ceil() as usize).min(order.len());
        prefix_sizes.push(p);
        shares.push(prefix[p] as f64 / e as f64);
    }
    Ok(TailProfile {
        num_vertices: g.num_vertices(),
        num_edges: e,
        m_values: m_values.to_vec(),
        prefix_sizes,
        shares,
    })
}

/// Smallest grid `M` whose prefix leaves at most `ε|E|` degree mass outside.
pub fn required_m(g: &SampledGraph, eps: f64) -> Result<Option<f64>> {
    let grid = m_grid();
    let profile = graph_tail_profile(g, &grid)?;
    Ok(grid
        .iter()
        .zip(&profile.shares)
        .find(|&(_, &s)| 2.0 - s <= eps)
        .map(|(&m, _)| m))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum TailRegularity {
    /// One `M` serves every graph.
    Regular {
        m: f64,
        /// Smallest sufficient grid point per graph.
        per_graph: Vec<f64>,
    },
    /// Some graph needs an `M` beyond the grid.
    Irregular {
        witness: usize,
        profile: TailProfile,
        per_graph: Vec<Option<f64>>,
    },
}

impl TailRegularity {
    pub fn m(&self) -> Option<f64> {
        match self {
            TailRegularity::Regular { m, .. } => Some(*m),
            TailRegularity::Irregular { .. } => None,
        }
    }

    pub fn per_graph(&self) -> Vec<Option<f64>> {
        match self {
            TailRegularity::Regular { per_graph, .. } => per_graph.iter().map(|&m| Some(m)).collect(),
            TailRegularity::Irregular { per_graph, .. } => per_graph.clone(),
        }
    }
}

/// Smallest grid `M` that works for every graph of the sequence at tolerance `ε`.
pub fn sequence_tail_regularity(graphs: &[SampledGraph], eps: f64) -> Result<TailRegularity> {
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "tail tolerance must lie in (0, 2), got {eps}"
        )));
    }
    let per_graph = graphs
        .par_iter()
        .map(|g| required_m(g, eps))
        .collect::<Result<Vec<_>>>()?;
    if let Some(witness) = per_graph.iter().position(Option::is_none) {
        let profile = graph_tail_profile(&graphs[witness], &m_grid())?;
        return Ok(TailRegularity::Irregular {
            witness,
            profile,
            per_graph,
        });
    }
    let per_graph: Vec<f64> = per_graph.into_iter().flatten().collect();
    let m = per_graph.iter().copied().fold(0.0, f64::max);
    Ok(TailRegularity::Regular { m, per_graph })
}

/// Average degree and the normalized counts of high-degree vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub avg_degree: f64,
    pub lambdas: Vec<f64>,
    /// `|{v : deg(v) > λ√(2|E|)}| / √(2|E|)` per `λ`.
    pub normalized_counts: Vec<f64>,
}

pub fn graph_degree_stats(g: &SampledGraph, lambdas: &[f64]) -> Result<DegreeStats> {
    let e = g.num_edges();
    if e == 0 {
        return Err(Error::EmptyGraph);
    }
    let scale = (2.0 * e as f64).sqrt();
    let degrees = g.degrees();
    let normalized_counts = lambdas
        .iter()
        .map(|&l| {
            let threshold = l * scale;
            degrees.iter().filter(|&&d| d as f64 > threshold).count() as f64 / scale
        })
        .collect();
    Ok(DegreeStats {
        avg_degree: 2.0 * e as f64 / g.num_vertices() as f64,
        lambdas: lambdas.to_vec(),
        normalized_counts,
    })
}

/// L¹ mass of the entries `≥ K` of the unit-norm canonical graphon averaged
/// over `q` vertex classes of near-equal size (consecutive vertex indices).
pub fn upper_regularity_statistic(g: &SampledGraph, q: usize, k_value: f64) -> Result<f64> {
    let n = g.num_vertices();
    let e = g.num_edges();
    if e == 0 {
        return Err(Error::EmptyGraph);
    }
    if q == 0 || q > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= q <= {n} classes, got {q}"
        )));
    }
    let class_of = |v: usize| v * q / n;
    let mut sizes = vec![0usize; q];
    (0..n).for_each(|v| sizes[class_of(v)] += 1);
    let mut ends = vec![0usize; q * q];
    for (u, v) in g.edges() {
        let (a, b) = (class_of(u), class_of(v));
        ends[a * q + b] += 1;
        ends[b * q + a] += 1;
    }
    // entry (a, b) of W^{G,r} averaged: ends(a, b) n² / (2|E| c_a c_b); cell mass c_a c_b / n²
    let mut stat = 0.0;
    for a in 0..q {
        for b in 0..q {
            let (ca, cb) = (sizes[a] as f64, sizes[b] as f64);
            let avg = ends[a * q + b] as f64 * (n * n) as f64 / (2.0 * e as f64 * ca * cb);
            if avg >= k_value {
                stat += avg * ca * cb / (n * n) as f64;
            }
        }
    }
    Ok(stat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn grid_spans_the_range() {
        let g = m_grid();
        assert_eq!(g[0], 0.1);
        assert!(*g.last().unwrap() <= 100.0);
        assert!(g.last().unwrap() * M_GRID_RATIO > 100.0);
    }

    #[test]
    fn clique_is_covered_near_root_two() {
        let g = generators::complete(20);
        let p = graph_tail_profile(&g, &[2f64.sqrt() + 1e-9, 10.0]).unwrap();
        assert_eq!(p.shares, vec![2.0, 2.0]);
    }

    #[test]
    fn star_center_carries_half() {
        let k = 50;
        let g = generators::star(k);
        let p = graph_tail_profile(&g, &[1.0 / (2.0 * k as f64).sqrt()]).unwrap();
        assert_eq!(p.prefix_sizes, vec![1]);
        assert_eq!(p.shares, vec![1.0]);
    }

    #[test]
    fn matching_prefix_share_vanishes() {
        let m = 400;
        let g = generators::perfect_matching(m);
        let p = graph_tail_profile(&g, &[1.0]).unwrap();
        assert_eq!(p.shares[0], 20.0 / 400.0);
    }

    #[test]
    fn isolated_vertices_do_not_change_profile() {
        let g = generators::erdos_renyi(60, 0.1, 4);
        let grid = m_grid();
        let a = graph_tail_profile(&g, &grid).unwrap();
        let b = graph_tail_profile(&g.with_isolated(25), &grid).unwrap();
        assert_eq!(a.shares, b.shares);
    }

    #[test]
    fn cliques_are_regular() {
        let graphs: Vec<_> = [10, 40, 80].iter().map(|&m| generators::complete(m)).collect();
        let r = sequence_tail_regularity(&graphs, 0.1).unwrap();
        let m = r.m().unwrap();
        assert!(m >= 0.95 * 2f64.sqrt() && m < 2.0);
    }

    #[test]
    fn clique_degree_stats() {
        let m = 30;
        let s = graph_degree_stats(&generators::complete(m), &[0.5]).unwrap();
        assert_eq!(s.avg_degree, (m - 1) as f64);
        let expected = m as f64 / ((m * (m - 1)) as f64).sqrt();
        assert!((s.normalized_counts[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn clique_upper_regularity() {
        let g = generators::complete(12);
        assert!((upper_regularity_statistic(&g, 1, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(upper_regularity_statistic(&g, 1, 1.01).unwrap(), 0.0);
        assert!(upper_regularity_statistic(&g, 13, 1.0).is_err());
        assert!(upper_regularity_statistic(&SampledGraph::empty(4), 1, 1.0).is_err());
    }
}
