//! Configuration categories of graphs, coverings and covering towers,
//! together with their comparison functors and checks.

pub mod config;
pub mod determinacy;
pub mod fin;
pub mod local;
pub mod squares;
pub mod stack;
pub mod strata;
pub mod tower;

pub use config::{ConfArrow, ConfigCategory, Levels};
pub use fin::{plain_fin, FinArrow, FinCategory, FinObject, PlainMap};
pub use stack::{Bounds, CoveringStack, Step};
