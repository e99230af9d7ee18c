//! Motif counts and step densities against exhaustive enumeration.

use graphonlab::generators;
use graphonlab::homomorphisms::{
    count_embeddings, h_analytic, h_step, rescaled_density, DensityMethod, HomOptions, MotifGraph,
};
use graphonlab::{Graphon, SampledGraph, StepGraphon};
use proptest::prelude::*;

/// Counts all maps `V(F) → V(G)` preserving adjacency by odometer enumeration.
fn oracle_counts(f: &MotifGraph, g: &SampledGraph) -> (u128, u128) {
    let k = f.num_vertices();
    let n = g.num_vertices();
    if n == 0 {
        return (0, 0);
    }
    let mut phi = vec![0usize; k];
    let (mut hom, mut inj) = (0u128, 0u128);
    loop {
        if f.edges().iter().all(|&(a, b)| g.has_edge(phi[a], phi[b])) {
            hom += 1;
            let mut seen = phi.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() == k {
                inj += 1;
            }
        }
        let mut i = 0;
        while i < k {
            phi[i] += 1;
            if phi[i] < n {
                break;
            }
            phi[i] = 0;
            i += 1;
        }
        if i == k {
            return (inj, hom);
        }
    }
}

/// `Σ_φ Π m_φ(v) Π_{uv∈E} W_{φ(u)φ(v)} / ‖W‖₁^{k/2}` over all block assignments.
fn oracle_step_density(f: &MotifGraph, w: &StepGraphon) -> f64 {
    let k = f.num_vertices();
    let n = w.num_blocks();
    let mut phi = vec![0usize; k];
    let mut total = 0.0;
    loop {
        let mass: f64 = phi.iter().map(|&b| w.masses()[b]).product();
        let weight: f64 = f.edges().iter().map(|&(a, b)| w.value(phi[a], phi[b])).product();
        total += mass * weight;
        let mut i = 0;
        while i < k {
            phi[i] += 1;
            if phi[i] < n {
                break;
            }
            phi[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
    }
    total / w.l1_norm().powf(k as f64 / 2.0)
}

fn motifs() -> Vec<MotifGraph> {
    ["edge", "path3", "triangle", "c4", "star_3", "0-1,1-2,2-3"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}

fn graph_strategy() -> impl Strategy<Value = SampledGraph> {
    (2usize..8).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            SampledGraph::from_edges(n, &edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn counts_match_enumeration(g in graph_strategy()) {
        for f in motifs() {
            let c = count_embeddings(&f, &g).unwrap();
            prop_assert_eq!((c.inj, c.hom), oracle_counts(&f, &g), "{}", f);
            prop_assert!(c.inj <= c.hom);
        }
    }

    #[test]
    fn counts_ignore_vertex_order(g in graph_strategy(), shift in 0usize..8) {
        let n = g.num_vertices();
        let relabel = |v: usize| (v + shift) % n;
        let edges: Vec<_> = g.edges().map(|(u, v)| (relabel(u), relabel(v))).collect();
        let h = SampledGraph::from_edges(n, &edges).unwrap();
        for f in motifs() {
            prop_assert_eq!(count_embeddings(&f, &g).unwrap(), count_embeddings(&f, &h).unwrap());
        }
    }

    #[test]
    fn step_density_matches_enumeration(
        masses in prop::collection::vec(0.1f64..2.0, 1..4),
        raw in prop::collection::vec(0.05f64..1.0, 9),
    ) {
        let n = masses.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                values[i * n + j] = raw[i.min(j) * 3 + i.max(j)];
            }
        }
        let w = StepGraphon::from_flat(masses, values, false).unwrap();
        for f in motifs() {
            let got = h_step(&f, &w).unwrap();
            let want = oracle_step_density(&f, &w);
            prop_assert!((got.value - want).abs() <= 1e-12 * want.max(1.0), "{}: {} vs {}", f, got.value, want);
            prop_assert_eq!(got.method, DensityMethod::Exact);
        }
    }
}

#[test]
fn edge_density_of_graphs_is_one() {
    for seed in 0..20 {
        let g = generators::erdos_renyi(30, 0.2, seed);
        if g.num_edges() > 0 {
            assert_eq!(rescaled_density(&MotifGraph::edge(), &g).unwrap().h, 1.0);
        }
    }
}

#[test]
fn cycle_path_density_closed_form() {
    for n in [3usize, 10, 1000] {
        let h = rescaled_density(&MotifGraph::path(3), &generators::cycle(n)).unwrap().h;
        let expected = 4.0 * n as f64 / (2.0 * n as f64).powf(1.5);
        assert!((h - expected).abs() <= 1e-12, "n {n}");
    }
}

#[test]
fn complete_graph_triangle_counts() {
    let c = count_embeddings(&MotifGraph::triangle(), &generators::complete(7)).unwrap();
    assert_eq!(c.inj, 7 * 6 * 5);
    assert_eq!(c.hom, 7 * 6 * 5);
}

#[test]
fn one_block_density_closed_form() {
    let w: Graphon = StepGraphon::constant(1.0, 0.5).unwrap().into();
    let h = h_analytic(&MotifGraph::triangle(), &w, &HomOptions::default()).unwrap();
    assert!((h.value - 0.5f64.powf(1.5)).abs() < 1e-15);
}
