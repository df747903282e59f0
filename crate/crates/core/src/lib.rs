//! Training and evaluation engine for adversarial multi-graph representation
//! learning: several graphs over one node set are embedded by a
//! shared-parameter graph-convolutional generator whose per-graph outputs are
//! pushed into a common subspace by a graph-origin discriminator, and the
//! aligned representation drives semi-supervised node classification.

pub mod cli;
pub mod error;
pub mod graph;
pub mod harness;
pub mod model;
pub mod nd;
pub mod train;

pub use error::{Error, Result};
