//! Random walks on random graphs and on the complete graph: traces, hitting
//! times of monotone properties, expanders, boosters and mixing.

pub mod error;
pub mod expander;
pub mod experiment;
pub mod graph;
pub mod hamilton;
pub mod mixing;
pub mod models;
pub mod pipeline;
pub mod structure;
pub mod tail;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{MultiGraph, VertexSet};
pub use models::SeedStream;
