use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest motif accepted by the counting routines.
pub const MOTIF_VERTEX_LIMIT: usize = 8;
/// Largest star accepted by name.
pub const NAMED_STAR_LIMIT: usize = 6;

/// A small simple connected graph on vertices `0..k`, `k ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MotifRepr", into = "MotifRepr")]
pub struct MotifGraph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct MotifRepr {
    vertices: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<MotifRepr> for MotifGraph {
    type Error = Error;

    fn try_from(r: MotifRepr) -> Result<Self> {
        let edges: Vec<(usize, usize)> = r.edges.iter().map(|e| (e[0], e[1])).collect();
        MotifGraph::new(r.vertices, &edges)
    }
}

impl From<MotifGraph> for MotifRepr {
    fn from(m: MotifGraph) -> Self {
        MotifRepr {
            vertices: m.vertices,
            edges: m.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }
}

impl MotifGraph {
    pub fn new(vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if vertices < 2 {
            return Err(Error::InvalidMotif(format!(
                "a motif needs at least two vertices, got {vertices}"
            )));
        }
        let mut adjacency = vec![Vec::new(); vertices];
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= vertices || v >= vertices {
                return Err(Error::InvalidMotif(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{vertices}"
                )));
            }
            if u == v {
                return Err(Error::InvalidMotif(format!("self-loop at vertex {u}")));
            }
            if adjacency[u].contains(&v) {
                return Err(Error::InvalidMotif(format!("duplicate edge ({u}, {v})")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            normalized.push((u.min(v), u.max(v)));
        }
        adjacency.iter_mut().for_each(|nb| nb.sort_unstable());
        normalized.sort_unstable();
        let mut seen = vec![false; vertices];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adjacency[u] {
                if !std::mem::replace(&mut seen[v], true) {
                    stack.push(v);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidMotif("motif must be connected".into()));
        }
        Ok(Self {
            vertices,
            edges: normalized,
            adjacency,
        })
    }

    pub fn edge() -> Self {
        Self::path(2)
    }

    /// Path on `k` vertices.
    pub fn path(k: usize) -> Self {
        let edges: Vec<_> = (1..k).map(|i| (i - 1, i)).collect();
        Self::new(k, &edges).expect("paths with k >= 2 are connected")
    }

    /// Star with center `0` and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Self::new(leaves + 1, &edges).expect("stars with a leaf are connected")
    }

    pub fn cycle(k: usize) -> Self {
        let edges: Vec<_> = (0..k).map(|i| (i, (i + 1) % k)).collect();
        Self::new(k, &edges).expect("cycles with k >= 3 are simple")
    }

    pub fn complete(k: usize) -> Self {
        let edges: Vec<_> = (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .collect();
        Self::new(k, &edges).expect("complete graphs are connected")
    }

    pub fn triangle() -> Self {
        Self::complete(3)
    }

    /// Motif by name (`edge`, `path3`, `star_k` for `k ≤ 6`, `triangle`,
    /// `c4`, `k4`) or inline edge list such as `0-1,1-2,2-0`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        match t {
            "edge" | "k2" => return Ok(Self::edge()),
            "path3" => return Ok(Self::path(3)),
            "triangle" | "k3" => return Ok(Self::triangle()),
            "c4" => return Ok(Self::cycle(4)),
            "k4" => return Ok(Self::complete(4)),
            _ => {}
        }
        if let Some(k) = t.strip_prefix("star_") {
            let k: usize = k
                .parse()
                .map_err(|_| Error::InvalidMotif(format!("bad star size in `{t}`")))?;
            if k == 0 || k > NAMED_STAR_LIMIT {
                return Err(Error::InvalidMotif(format!(
                    "named stars have 1 to {NAMED_STAR_LIMIT} leaves, got {k}"
                )));
            }
            return Ok(Self::star(k));
        }
        let mut edges = Vec::new();
        for part in t.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (a, b) = part
                .split_once('-')
                .ok_or_else(|| Error::InvalidMotif(format!("unknown motif `{t}`")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidMotif(format!("bad vertex `{s}` in `{t}`")))
            };
            edges.push((parse(a)?, parse(b)?));
        }
        let vertices = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        Self::new(vertices, &edges)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges `(u, v)` with `u < v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertices).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Number of leaves if the motif is a star `K_{1,d}` with `d ≥ 2`.
    pub fn star_leaves(&self) -> Option<usize> {
        let d = self.max_degree();
        (d >= 2 && d + 1 == self.vertices && self.edges.len() == d).then_some(d)
    }

    /// Vertices in breadth-first order from `0`, each with its earlier neighbors.
    pub(crate) fn search_order(&self) -> Vec<(usize, Vec<usize>)> {
        let mut order = vec![0];
        let mut pos = vec![usize::MAX; self.vertices];
        pos[0] = 0;
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &v in &self.adjacency[u] {
                if pos[v] == usize::MAX {
                    pos[v] = order.len();
                    order.push(v);
                }
            }
        }
        order
            .iter()
            .enumerate()
            .map(|(i, &u)| {
                let earlier: Vec<usize> = self.adjacency[u]
                    .iter()
                    .map(|&v| pos[v])
                    .filter(|&p| p < i)
                    .collect();
                (u, earlier)
            })
            .collect()
    }
}

impl FromStr for MotifGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for MotifGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
        f.write_str(&parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_motifs() {
        assert_eq!(MotifGraph::parse("edge").unwrap().num_edges(), 1);
        assert_eq!(MotifGraph::parse("path3").unwrap().num_edges(), 2);
        assert_eq!(MotifGraph::parse("star_4").unwrap().num_vertices(), 5);
        assert_eq!(MotifGraph::parse("c4").unwrap().num_edges(), 4);
        assert_eq!(MotifGraph::parse("k4").unwrap().num_edges(), 6);
        assert!(MotifGraph::parse("star_7").is_err());
    }

    #[test]
    fn inline_edges_round_trip() {
        let m = MotifGraph::parse("0-1, 1-2, 2-0").unwrap();
        assert_eq!(m, MotifGraph::triangle());
        assert_eq!(MotifGraph::parse(&m.to_string()).unwrap(), m);
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<MotifGraph>(&json).unwrap(), m);
    }

    #[test]
    fn rejects_invalid_motifs() {
        assert!(MotifGraph::new(1, &[]).is_err());
        assert!(MotifGraph::new(3, &[(0, 1)]).is_err());
        assert!(MotifGraph::new(2, &[(0, 1), (1, 0)]).is_err());
        assert!(MotifGraph::new(2, &[(0, 0)]).is_err());
    }

    #[test]
    fn stars_are_recognized() {
        assert_eq!(MotifGraph::star(3).star_leaves(), Some(3));
        assert_eq!(MotifGraph::path(3).star_leaves(), Some(2));
        assert_eq!(MotifGraph::edge().star_leaves(), None);
        assert_eq!(MotifGraph::triangle().star_leaves(), None);
    }

    #[test]
    fn search_order_has_earlier_neighbors() {
        let m = MotifGraph::cycle(5);
        for (i, (_, earlier)) in m.search_order().iter().enumerate().skip(1) {
            assert!(!earlier.is_empty());
            assert!(earlier.iter().all(|&p| p < i));
        }
    }
}
