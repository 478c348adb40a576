//! Exponent certificates, exponent polytopes, rigidity probes and mollified
//! form estimators for multilinear forms built from the unit-circle kernel on
//! a finite graph.

pub mod cli;
pub mod estimator;
pub mod exponents;
pub mod graph;
pub mod leray;
pub mod lp;
pub mod rational;
pub mod rigidity;

pub use graph::{parse_graph, Graph, GraphError};
pub use rational::Q;

/// Version string recorded in every artifact header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
