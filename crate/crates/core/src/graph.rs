//! Simple undirected graphs with optional vertex metadata.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple undirected graph on vertices `0..n`.
///
/// Each vertex carries a positive label and, for graphs read off a graphon
/// process, a birth time and a feature point.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGraph {
    labels: Vec<u64>,
    births: Option<Vec<f64>>,
    features: Option<Vec<Vec<f64>>>,
    adjacency: Vec<Vec<usize>>,
    num_edges: usize,
}

/// Summary statistics of a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub num_vertices: usize,
    pub num_edges: usize,
    pub edge_density: f64,
    pub max_degree: usize,
}

impl SampledGraph {
    /// Edgeless graph on `n` vertices labeled `1..=n`.
    pub fn empty(n: usize) -> Self {
        Self {
            labels: (1..=n as u64).collect(),
            births: None,
            features: None,
            adjacency: vec![Vec::new(); n],
            num_edges: 0,
        }
    }

    /// Graph on `n` vertices labeled `1..=n` with the given edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            g.adjacency[u].push(v);
            g.adjacency[v].push(u);
        }
        for (u, nb) in g.adjacency.iter_mut().enumerate() {
            nb.sort_unstable();
            if let Some(w) = nb.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({u}, {})",
                    w[0]
                )));
            }
        }
        g.num_edges = edges.len();
        Ok(g)
    }

    /// Builds a graph from sorted, deduplicated adjacency lists.
    pub(crate) fn from_sorted_adjacency(
        labels: Vec<u64>,
        births: Option<Vec<f64>>,
        features: Option<Vec<Vec<f64>>>,
        adjacency: Vec<Vec<usize>>,
    ) -> Self {
        let num_edges = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        Self {
            labels,
            births,
            features,
            adjacency,
            num_edges,
        }
    }

    pub fn with_labels(mut self, labels: Vec<u64>) -> Result<Self> {
        if labels.len() != self.num_vertices() {
            return Err(Error::InvalidGraph(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.num_vertices()
            )));
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph("vertex labels must be unique".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    /// `ρ(G) = 2|E| / |V|²`, zero for the graph with no vertices.
    pub fn edge_density(&self) -> f64 {
        let n = self.num_vertices();
        if n == 0 {
            0.0
        } else {
            2.0 * self.num_edges as f64 / (n as f64 * n as f64)
        }
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn births(&self) -> Option<&[f64]> {
        self.births.as_deref()
    }

    pub fn features(&self) -> Option<&[Vec<f64>]> {
        self.features.as_deref()
    }

    /// Sorted neighbor indices of vertex `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats {
            num_vertices: self.num_vertices(),
            num_edges: self.num_edges,
            edge_density: self.edge_density(),
            max_degree: self.adjacency.iter().map(Vec::len).max().unwrap_or(0),
        }
    }

    /// Induced subgraph on `keep`, in the given order.
    pub fn induced(&self, keep: &[usize]) -> SampledGraph {
        let mut new_index = vec![usize::MAX; self.num_vertices()];
        for (i, &v) in keep.iter().enumerate() {
            new_index[v] = i;
        }
        let adjacency = keep
            .iter()
            .map(|&v| {
                let mut nb: Vec<usize> = self.adjacency[v]
                    .iter()
                    .filter_map(|&u| (new_index[u] != usize::MAX).then_some(new_index[u]))
                    .collect();
                nb.sort_unstable();
                nb
            })
            .collect();
        let pick = |xs: &Vec<f64>| keep.iter().map(|&v| xs[v]).collect();
        SampledGraph::from_sorted_adjacency(
            keep.iter().map(|&v| self.labels[v]).collect(),
            self.births.as_ref().map(pick),
            self.features
                .as_ref()
                .map(|fs| keep.iter().map(|&v| fs[v].clone()).collect()),
            adjacency,
        )
    }

    /// The graph with every degree-zero vertex deleted.
    pub fn remove_isolated(&self) -> SampledGraph {
        let keep: Vec<usize> = (0..self.num_vertices())
            .filter(|&v| !self.adjacency[v].is_empty())
            .collect();
        self.induced(&keep)
    }

    /// The graph with `count` extra isolated vertices appended.
    pub fn with_isolated(&self, count: usize) -> SampledGraph {
        let mut g = self.clone();
        let next = g.labels.iter().copied().max().unwrap_or(0);
        g.labels.extend((1..=count as u64).map(|i| next + i));
        g.adjacency.extend(std::iter::repeat_with(Vec::new).take(count));
        // the new vertices have no birth time or feature
        g.births = None;
        g.features = None;
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_follows_definition() {
        let g = SampledGraph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.edge_density(), 4.0 / 16.0);
        assert_eq!(SampledGraph::empty(0).edge_density(), 0.0);
    }

    #[test]
    fn rejects_loops_and_duplicates() {
        assert!(SampledGraph::from_edges(3, &[(1, 1)]).is_err());
        assert!(SampledGraph::from_edges(3, &[(0, 1), (1, 0)]).is_err());
        assert!(SampledGraph::from_edges(3, &[(0, 3)]).is_err());
    }

    #[test]
    fn isolated_vertices_round_trip() {
        let g = SampledGraph::from_edges(3, &[(0, 1)]).unwrap();
        let h = g.with_isolated(4);
        assert_eq!(h.num_vertices(), 7);
        assert_eq!(h.num_edges(), 1);
        let r = h.remove_isolated();
        assert_eq!(r.num_vertices(), 2);
        assert_eq!(r.labels(), &[1, 2]);
    }

    #[test]
    fn induced_keeps_internal_edges() {
        let g = SampledGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let h = g.induced(&[1, 2, 3]);
        assert_eq!(h.num_edges(), 2);
        assert!(h.has_edge(0, 1) && h.has_edge(1, 2) && !h.has_edge(0, 2));
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }
}
