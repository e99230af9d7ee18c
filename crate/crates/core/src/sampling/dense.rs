use crate::error::{Error, Result};
use crate::graph::SampledGraph;
use crate::graphon::Graphon;
use crate::rng::{derive_seed, pair_uniform, stream_rng};

/// Classical `W`-random graph: `n` i.i.d. features from the normalized
/// measure and independent edges with probability `W`.
pub fn sample_dense_wrandom(w: &Graphon, n: usize, seed: u64) -> Result<SampledGraph> {
    if w.ambient_infinite() {
        return Err(Error::InvalidArgument(
            "W-random graphs need a finite measure space; truncate the tail first".into(),
        ));
    }
    w.check_probability_valued()?;
    let region = w.sampling_region();
    let mut rng = stream_rng(seed, 0);
    let features = (0..n)
        .map(|_| region.sample(&mut rng))
        .collect::<Result<Vec<_>>>()?;
    let edge_seed = derive_seed(seed, &[1]);
    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let p = w.evaluate(&features[i], &features[j]);
            if p > 0.0 && pair_uniform(edge_seed, i as u64, j as u64) < p {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }
    adjacency.iter_mut().for_each(|nb| nb.sort_unstable());
    Ok(SampledGraph::from_sorted_adjacency(
        (1..=n as u64).collect(),
        None,
        Some(features),
        adjacency,
    ))
}
