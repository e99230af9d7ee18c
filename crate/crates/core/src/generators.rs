//! Deterministic graph families and Erdős–Rényi sampling.

use rand::Rng;

use crate::graph::SampledGraph;
use crate::rng::stream_rng;

fn build(n: usize, edges: Vec<(usize, usize)>) -> SampledGraph {
    SampledGraph::from_edges(n, &edges).expect("generator emits simple edge lists")
}

/// Complete graph `K_n`.
pub fn complete(n: usize) -> SampledGraph {
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    build(n, edges)
}

/// Cycle `C_n` (`n ≥ 3`); smaller `n` give the path on `n` vertices.
pub fn cycle(n: usize) -> SampledGraph {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
    if n >= 3 {
        edges.push((0, n - 1));
    }
    build(n, edges)
}

/// Path on `n` vertices.
pub fn path(n: usize) -> SampledGraph {
    build(n, (1..n).map(|v| (v - 1, v)).collect())
}

/// Star with center 0 and `k` leaves.
pub fn star(k: usize) -> SampledGraph {
    build(k + 1, (1..=k).map(|v| (0, v)).collect())
}

/// Perfect matching on `2m` vertices.
pub fn perfect_matching(m: usize) -> SampledGraph {
    build(2 * m, (0..m).map(|i| (2 * i, 2 * i + 1)).collect())
}

/// Complete bipartite graph `K_{a,b}`.
pub fn complete_bipartite(a: usize, b: usize) -> SampledGraph {
    let mut edges = Vec::with_capacity(a * b);
    for u in 0..a {
        for v in 0..b {
            edges.push((u, a + v));
        }
    }
    build(a + b, edges)
}

/// Clique on the first `clique` vertices plus `n − clique` isolated vertices.
pub fn clique_plus_isolated(n: usize, clique: usize) -> SampledGraph {
    complete(clique.min(n)).with_isolated(n.saturating_sub(clique))
}

/// `G(n, p)` drawn by geometric skipping over the `n(n−1)/2` pairs.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> SampledGraph {
    let mut edges = Vec::new();
    if p >= 1.0 {
        return complete(n);
    }
    if p > 0.0 && n >= 2 {
        let mut rng = stream_rng(seed, 0);
        let log_q = (1.0 - p).ln();
        let (mut v, mut w): (usize, i64) = (1, -1);
        while v < n {
            let r: f64 = rng.random();
            let skip = ((1.0 - r).ln() / log_q).floor();
            w += 1 + skip.min(i64::MAX as f64 / 2.0) as i64;
            while v < n && w >= v as i64 {
                w -= v as i64;
                v += 1;
            }
            if v < n {
                edges.push((w as usize, v));
            }
        }
    }
    build(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_sizes() {
        assert_eq!(complete(5).num_edges(), 10);
        assert_eq!(cycle(6).num_edges(), 6);
        assert_eq!(path(4).num_edges(), 3);
        assert_eq!(star(4).degree(0), 4);
        assert_eq!(perfect_matching(3).num_edges(), 3);
        assert_eq!(complete_bipartite(2, 3).num_edges(), 6);
        let g = clique_plus_isolated(10, 4);
        assert_eq!((g.num_vertices(), g.num_edges()), (10, 6));
    }

    #[test]
    fn erdos_renyi_edge_count_is_binomial() {
        let n = 400;
        let p = 0.05;
        let g = erdos_renyi(n, p, 17);
        let pairs = (n * (n - 1) / 2) as f64;
        let sd = (pairs * p * (1.0 - p)).sqrt();
        assert!((g.num_edges() as f64 - pairs * p).abs() < 4.0 * sd);
        assert_eq!(g, erdos_renyi(n, p, 17));
        assert_eq!(erdos_renyi(n, 0.0, 1).num_edges(), 0);
        assert_eq!(erdos_renyi(5, 1.0, 1).num_edges(), 10);
    }
}
