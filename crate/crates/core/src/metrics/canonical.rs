use super::distance::{cut_distance, DistanceOptions, DistanceReport};
use crate::error::Result;
use crate::graph::SampledGraph;
use crate::graphon::StepGraphon;

/// `W^G`: one block of mass `1/n` per vertex, values given by the adjacency matrix.
pub fn canonical_graphon(g: &SampledGraph) -> StepGraphon {
    let n = g.num_vertices();
    if n == 0 {
        return StepGraphon::zero(false);
    }
    StepGraphon::from_flat(vec![1.0 / n as f64; n], adjacency_values(g), false)
        .expect("adjacency matrix is a valid kernel")
}

/// `W^{G,s}`: the adjacency kernel with every vertex occupying mass
/// `1/√(2|E|)`, so that its L¹ norm is one. Edgeless graphs map to the zero graphon.
pub fn stretched_canonical_graphon(g: &SampledGraph) -> StepGraphon {
    let m = g.num_edges();
    if m == 0 {
        return StepGraphon::zero(true);
    }
    let n = g.num_vertices();
    let mass = 1.0 / (2.0 * m as f64).sqrt();
    StepGraphon::from_flat(vec![mass; n], adjacency_values(g), true)
        .expect("adjacency matrix is a valid kernel")
}

fn adjacency_values(g: &SampledGraph) -> Vec<f64> {
    let n = g.num_vertices();
    let mut values = vec![0.0; n * n];
    for (u, v) in g.edges() {
        values[u * n + v] = 1.0;
        values[v * n + u] = 1.0;
    }
    values
}

/// Argument of [`stretched_cut_distance`].
#[derive(Debug, Clone, Copy)]
pub enum Operand<'a> {
    Graph(&'a SampledGraph),
    Graphon(&'a StepGraphon),
}

impl Operand<'_> {
    /// The unit-L¹ step graphon standing for this operand.
    pub fn stretched(&self) -> StepGraphon {
        match self {
            Operand::Graph(g) => stretched_canonical_graphon(g),
            Operand::Graphon(w) => w.stretch(),
        }
    }
}

impl<'a> From<&'a SampledGraph> for Operand<'a> {
    fn from(g: &'a SampledGraph) -> Self {
        Operand::Graph(g)
    }
}

impl<'a> From<&'a StepGraphon> for Operand<'a> {
    fn from(w: &'a StepGraphon) -> Self {
        Operand::Graphon(w)
    }
}

/// `δ_□^s(A, B)`: cut distance after rescaling both measures to unit L¹ norm.
pub fn stretched_cut_distance(
    a: Operand<'_>,
    b: Operand<'_>,
    options: &DistanceOptions,
) -> Result<DistanceReport> {
    cut_distance(&a.stretched(), &b.stretched(), options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn single_edge() {
        let k2 = generators::complete(2);
        let w = canonical_graphon(&k2);
        assert_eq!(w.masses(), &[0.5, 0.5]);
        assert_eq!(w.values_matrix(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let s = stretched_canonical_graphon(&k2);
        assert!((s.masses()[0] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((s.l1_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_has_unit_norm() {
        let s = stretched_canonical_graphon(&generators::complete(3));
        assert!((s.masses()[0] - 1.0 / 6f64.sqrt()).abs() < 1e-15);
        assert!((s.l1_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_graph_is_zero() {
        let g = SampledGraph::empty(3);
        assert!(stretched_canonical_graphon(&g).is_zero());
        assert!(canonical_graphon(&SampledGraph::empty(0)).is_zero());
        let z = StepGraphon::zero(true);
        let r = stretched_cut_distance((&z).into(), (&g).into(), &DistanceOptions::exact()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn isolated_vertices_are_invisible() {
        let g = generators::cycle(4);
        let h = g.with_isolated(3);
        let r = stretched_cut_distance((&g).into(), (&h).into(), &DistanceOptions::exact()).unwrap();
        assert_eq!(r.value, 0.0);
    }
}
