//! Cut norms, cut and invariant L¹ distances, canonical graphons of graphs,
//! stretched distances and weak-regularity partitions.

mod canonical;
mod coupling;
mod cutnorm;
mod distance;
mod estimate;
mod refinement;
mod weak_regularity;

pub use canonical::{
    canonical_graphon, stretched_canonical_graphon, stretched_cut_distance, Operand,
};
pub use coupling::{build_coupling, Coupling};
pub use cutnorm::{
    cut_norm, cut_norm_auto, cut_norm_brute_force, cut_norm_weighted, CutNorm, CutNormMode,
    EXACT_CUT_NORM_LIMIT,
};
pub use distance::{
    cut_distance, invariant_l1_distance, CouplingCell, DistanceMode, DistanceOptions,
    DistanceReport, ReportMode, Witness, ANNEAL_BLOCK_LIMIT, ANNEAL_EXACT_OBJECTIVE,
    EXACT_PAIRING_LIMIT, EXACT_PERMUTATION_LIMIT,
};
pub use estimate::{
    graph_graphon_distance_estimate, graph_step_distance_estimate, Alignment, DistanceEstimate,
    ESTIMATE_EXACT_CELLS,
};
pub use refinement::{common_refinement, default_quantum, quantize, Quantization, Refinement};
pub use weak_regularity::{
    weak_regularity_partition, WeakRegularity, WEAK_REGULARITY_EXACT_BLOCKS,
};
