//! Sequential Bayesian social learning on networks.
//!
//! Agents on an undirected graph act one at a time in a decision ordering.
//! Each holds a private binary signal that matches the hidden state with
//! probability `q`, sees the actions of neighbors that acted earlier, and
//! announces its maximum a posteriori guess. This crate computes those
//! decisions and the resulting learning rates, generates the network
//! families that learn (or fail to), and greedily augments arbitrary
//! networks so that most agents learn under random orderings.

pub mod analytics;
pub mod booster;
pub mod engine;
pub mod exhaustive;
pub mod families;
pub mod error;
pub mod graph;
pub mod ordering;
pub mod rates;
pub mod robustness;
pub mod seed;
pub mod verify;

pub use error::{Error, GraphError, Result};
pub use graph::{Graph, Modification, Vertex};
pub use ordering::{Ordering, OrientedView};
