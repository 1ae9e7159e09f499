//! Constructive tools for regular decompositions of 3-uniform hypergraphs of
//! bounded VC₂-dimension.
//!
//! The crate measures graph and 3-graph quasirandomness exactly, detects
//! VC₂ and U(k) patterns, clusters auxiliary edge-colored graphs with a
//! greedy packing, splits bipartite graphs into quasirandom parts, and runs
//! the decomposition-compression pipeline that reduces the number of pair
//! parts per class.

pub mod analysis;
pub mod error;
pub mod generators;
pub mod model;
pub mod quasirandom;
pub mod rng;
pub mod splitting;
pub mod packing;
pub mod pipeline;
pub mod vc;

pub use error::{Error, Result};
pub use model::*;
