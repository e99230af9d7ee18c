//! Graphons over σ-finite measure spaces.
//!
//! The crate builds step and closed-form graphons, samples graphon processes
//! from them, and measures how sampled graphs relate to their limits: cut
//! norms and cut distances, the stretched cut metric, rescaled homomorphism
//! densities, and tail-regularity diagnostics. The experiments module
//! bundles these into a seeded batch harness.

pub mod error;
pub mod experiments;
pub mod generators;
pub mod graph;
pub mod graphon;
pub mod homomorphisms;
pub mod metrics;
pub mod quadrature;
pub mod regularity;
pub mod rng;
pub mod sampling;

pub use error::{Error, Result};
pub use graphon::{
    AnalyticGraphon, DegreeProfile, FeatureRegion, Graphon, GraphonSpec, Partition, StepGraphon,
    TailTruncation,
};
pub use graph::SampledGraph;
pub use quadrature::Estimate;
pub use sampling::ProcessTrace;
