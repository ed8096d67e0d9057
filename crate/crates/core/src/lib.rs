//! Percolation and random-walk laboratory on finite exhaustions of
//! transitive graphs.

pub mod error;
pub mod forests;
pub mod graph;
pub mod heatkernel;
pub mod percolation;
pub mod rng;
pub mod stats;
pub mod suite;
pub mod trimming;
pub mod walks;

pub use error::{Error, Result};
pub use graph::Graph;
