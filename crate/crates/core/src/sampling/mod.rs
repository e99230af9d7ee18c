//! Graphon processes, the sequential arrival model and dense `W`-random graphs.
//!
//! Every sampler is a pure function of its inputs and a `u64` seed.

mod dense;
mod process;
mod sequential;

pub use dense::sample_dense_wrandom;
pub use process::{sample_graphon_process, xi_box_counts, ProcessTrace, VertexRecord};
pub use sequential::{sample_sequential, RegionSchedule, SequentialSample};
