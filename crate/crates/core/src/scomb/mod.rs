//! Finite categories, truncated simplicial sets and their nerves, with the
//! strict checks run on them: simplicial identities, latching objects,
//! comma objects, Segal maps and levelwise pullbacks.

pub mod category;
pub mod checks;
pub mod export;
pub mod nerve;
pub mod sset;

pub use category::{fiber_product, to_terminal, Arrow, FiberProduct, FiniteCategory, Functor, Materialized};
pub use checks::{
    comma, is_strict_pullback, latching_agrees, latching_by_colimit, latching_by_degeneracies, segal_check,
    segal_check_graded, set_pullback, Comma, PullbackLevel, PullbackReport, SSetSquare, SetSquare,
};
pub use nerve::{nerve, nerve_map, Nerve};
pub use sset::{SimplicialMap, TruncatedSSet};
