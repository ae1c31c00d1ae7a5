//! Finite models of configuration categories over graph coverings, with
//! exhaustive checks of their strict categorical properties.

pub mod confcat;
pub mod epicat;
pub mod error;
pub mod finset;
pub mod graphcov;
pub mod scomb;

pub use error::{Error, Result};
pub use finset::{FinMap, Partition};
