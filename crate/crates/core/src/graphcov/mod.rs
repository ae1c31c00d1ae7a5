//! Finite graph coverings as a combinatorial stand-in for covering spaces
//! of manifolds.

pub mod covering;
pub mod graph;

pub use covering::{
    build_cyclic_tower, check_unique_lifting, covering_violation, enumerate_mapcov, is_fiberwise_injective,
    validate_covering, CoveringSpace, LiftingReport, Tower,
};
pub use graph::{all_graph_maps, all_paths, Dart, EdgePath, Graph, GraphMap};
