//! Counting temporal butterflies, the six time-ordered `(2,2)`-bicliques of a
//! temporal bipartite graph.
//!
//! * [`graph`]: the indexed multigraph, edge-list loading and synthetic graphs.
//! * [`motif`]: the six butterfly types and the timestamp classifier.
//! * [`counting`]: exact per-edge and whole-graph counts, plus a brute-force oracle.
//! * [`sampling`]: edge, node and time-interval sampling estimators.
//! * [`bounds`]: variance bounds and `(epsilon, delta)` sample sizes.
//! * [`bench`]: repeated-run experiments, MAPE and report export.
//!
//! ```
//! use temporal_butterfly::{counting, graph::TemporalBipartiteGraph};
//!
//! let g = TemporalBipartiteGraph::from_edges(2, 2, [(0, 0, 1), (1, 0, 2), (0, 1, 3), (1, 1, 4)])?;
//! assert_eq!(counting::exact_count(&g, 10)?.0, [1, 0, 0, 0, 0, 0]);
//! # Ok::<(), temporal_butterfly::Error>(())
//! ```

pub mod bench;
pub mod bounds;
pub mod cli;
pub mod counting;
mod error;
pub mod graph;
pub mod motif;
pub mod sampling;

pub use error::{Error, Result};
pub use graph::{Layer, Node, TemporalBipartiteGraph, Timestamp};
pub use motif::{ButterflyType, CountVector, Labeling};
pub use sampling::{EstimateVector, Method, SamplingConfig};
