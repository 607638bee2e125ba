//! Simulator, monitors and certifier for the seeded, regularized
//! triangle-free nibble process.

pub mod cli;
pub mod error;
pub mod graph;
pub mod heuristics;
pub mod independence;
pub mod monitors;
pub mod nibble;
pub mod pairgraph;
pub mod params;
pub mod rng;
pub mod seed;

pub use error::{Error, Result};
pub use graph::Graph;
pub use pairgraph::{Layer, PairRef, Partition, TriState};
pub use params::{ProcessParams, Profile};
pub use rng::StreamKey;
