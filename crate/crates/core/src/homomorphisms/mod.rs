//! Motif counts in sampled graphs and homomorphism densities of graphons.

mod count;
mod density;
mod motif;

pub use count::{count_embeddings, count_embeddings_brute_force, EmbeddingCounts};
pub use density::{
    h_analytic, h_step, rescaled_density, star_moment, DensityMethod, Finiteness, HomDensity,
    HomOptions, RescaledDensity, StarMoment, BLOCK_ASSIGNMENT_LIMIT,
};
pub use motif::{MotifGraph, MOTIF_VERTEX_LIMIT, NAMED_STAR_LIMIT};
