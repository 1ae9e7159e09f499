//! Domain types shared by every module: hypergraphs, bipartite and
//! edge-colored graphs, decompositions and triads, plus exact arithmetic.

pub mod bipartite;
pub mod bitset;
pub mod colored;
pub mod decomposition;
pub mod exact;
pub mod hypergraph;
pub mod triad;

pub use bipartite::BipartiteGraph;
pub use bitset::BitSet;
pub use colored::{Color, EdgeColoredBipartiteGraph, EdgeColoredTripartite3Graph};
pub use decomposition::{
    validate_decomposition, Decomposition, DecompositionIndex, PairClass, ValidationReport, Violation,
    ViolationKind,
};
pub use exact::Rational;
pub use hypergraph::Hypergraph3;
pub use triad::{Triad, TriadAddress, TriadView};
