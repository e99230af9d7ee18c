use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::motif::{MotifGraph, MOTIF_VERTEX_LIMIT};
use crate::error::{Error, Result};
use crate::graph::SampledGraph;

/// Labeled homomorphism counts of a motif into a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingCounts {
    /// Injective adjacency-preserving maps.
    pub inj: u128,
    /// All adjacency-preserving maps.
    pub hom: u128,
}

/// `inj(F, G)` and `hom(F, G)` by backtracking over the adjacency lists of `G`.
///
/// Motif vertices are placed in breadth-first order, so every vertex after
/// the first is drawn from the neighbors of an already placed vertex and
/// checked against its other placed neighbors. Injective maps also skip
/// targets whose degree is below the motif vertex's degree.
pub fn count_embeddings(f: &MotifGraph, g: &SampledGraph) -> Result<EmbeddingCounts> {
    check_size(f, g)?;
    Ok(EmbeddingCounts {
        inj: count(f, g, true),
        hom: count(f, g, false),
    })
}

fn check_size(f: &MotifGraph, g: &SampledGraph) -> Result<()> {
    let k = f.num_vertices();
    if k > MOTIF_VERTEX_LIMIT {
        return Err(Error::MotifTooLarge {
            vertices: k,
            limit: MOTIF_VERTEX_LIMIT,
            cost: (g.num_vertices().max(1) as f64).powi(k as i32),
        });
    }
    Ok(())
}

fn count(f: &MotifGraph, g: &SampledGraph, injective: bool) -> u128 {
    let order = f.search_order();
    let first = order[0].0;
    (0..g.num_vertices())
        .into_par_iter()
        .filter(|&v| !injective || g.degree(v) >= f.degree(first))
        .map(|v| {
            let mut images = vec![0usize; order.len()];
            images[0] = v;
            extend(&order, f, g, injective, 1, &mut images)
        })
        .sum()
}

fn extend(
    order: &[(usize, Vec<usize>)],
    f: &MotifGraph,
    g: &SampledGraph,
    injective: bool,
    pos: usize,
    images: &mut [usize],
) -> u128 {
    if pos == order.len() {
        return 1;
    }
    let (u, earlier) = &order[pos];
    let mut total = 0;
    for &c in g.neighbors(images[earlier[0]]) {
        if injective && (g.degree(c) < f.degree(*u) || images[..pos].contains(&c)) {
            continue;
        }
        if earlier[1..].iter().all(|&p| g.has_edge(images[p], c)) {
            images[pos] = c;
            total += extend(order, f, g, injective, pos + 1, images);
        }
    }
    total
}

/// Reference counts by enumerating all `n^k` vertex maps.
pub fn count_embeddings_brute_force(f: &MotifGraph, g: &SampledGraph) -> EmbeddingCounts {
    let k = f.num_vertices();
    let n = g.num_vertices();
    assert!((n as f64).powi(k as i32) <= 1e7, "brute force limited to 1e7 maps");
    let mut map = vec![0usize; k];
    let (mut inj, mut hom) = (0u128, 0u128);
    if n == 0 {
        return EmbeddingCounts { inj, hom };
    }
    loop {
        if f.edges().iter().all(|&(a, b)| g.has_edge(map[a], map[b])) {
            hom += 1;
            let mut sorted = map.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() == k {
                inj += 1;
            }
        }
        let mut i = 0;
        while i < k {
            map[i] += 1;
            if map[i] < n {
                break;
            }
            map[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
    }
    EmbeddingCounts { inj, hom }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn edges_are_counted_twice() {
        let g = generators::cycle(7);
        let c = count_embeddings(&MotifGraph::edge(), &g).unwrap();
        assert_eq!((c.inj, c.hom), (14, 14));
    }

    #[test]
    fn triangles_in_k4() {
        let c = count_embeddings(&MotifGraph::triangle(), &generators::complete(4)).unwrap();
        assert_eq!(c.inj, 24);
        assert_eq!(c.hom, 24);
    }

    #[test]
    fn paths_in_cycles() {
        for n in [4, 6, 9] {
            let c = count_embeddings(&MotifGraph::path(3), &generators::cycle(n)).unwrap();
            assert_eq!(c.hom, 4 * n as u128);
            assert_eq!(c.inj, 2 * n as u128);
        }
    }

    #[test]
    fn matches_brute_force() {
        let g = generators::erdos_renyi(7, 0.5, 11);
        for name in ["edge", "path3", "triangle", "c4", "star_3", "k4", "0-1,1-2,2-3,3-1"] {
            let f = MotifGraph::parse(name).unwrap();
            assert_eq!(
                count_embeddings(&f, &g).unwrap(),
                count_embeddings_brute_force(&f, &g),
                "{name}"
            );
        }
    }

    #[test]
    fn rejects_large_motifs() {
        let f = MotifGraph::path(9);
        assert!(matches!(
            count_embeddings(&f, &generators::cycle(5)),
            Err(Error::MotifTooLarge { vertices: 9, .. })
        ));
    }
}
