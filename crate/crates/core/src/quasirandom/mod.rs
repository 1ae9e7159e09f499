//! Quasirandomness statistics and the checks built on them.

pub mod counting;
pub mod dev2;
pub mod dev23;
pub mod disc;
pub(crate) mod octahedral;

pub use counting::{
    counting_lemma_check, hom_implies_random_check, symmetry_scan, union_dev2_check, CountingCheck, HomCheck,
    HomPreconditions, SymmetryReport, UnionCheck,
};
pub use dev2::{dev2, dev2_float, has_dev2, Dev2Float, Dev2Result, EvalMode};
pub use dev23::{dev23, dev23_float, has_dev23, k222_count, k222_link, triangle_set, Dev23Result};
pub use disc::{check_equivalence, disc2, disc2_exact_at, Disc2Result, DiscMode, Equivalence, DISC_EXACT_LIMIT};
