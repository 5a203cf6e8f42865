//! Simulation and verification toolkit for interacting spin systems on
//! finite graphs.
//!
//! The crate is organized around six layers:
//!
//! - [`graph`]: explicit adjacency for complete graphs, truncated regular
//!   trees, and lattice tori.
//! - [`engine`]: exact continuous-time samplers for the two-parameter voter
//!   dynamics, one driven by per-vertex rates, one by per-edge clocks and
//!   coins, plus a light-cone sampler for site observables on deep trees.
//! - [`coupling`]: a joint sampler that runs the voter dynamics and a
//!   contact process on shared randomness, preserving pointwise domination.
//! - [`meanfield`]: the logistic density limit in closed form, as an ODE
//!   integration, and as the exact two-state density chain on the complete
//!   graph.
//! - [`estimator`]: replica statistics with standard errors, joint cell
//!   tables, and the derived diagnostics used by the experiments.
//! - [`experiment`]: JSON-configured experiment definitions, a deterministic
//!   parallel runner, and CSV / JSON-lines emitters.
//!
//! Every run is reproducible: all randomness flows through [`rng::RngStream`]
//! values derived from a base seed, a replica index, and a purpose label, so
//! results do not depend on thread scheduling.

pub mod coupling;
pub mod engine;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod graph;
pub mod meanfield;
pub mod rng;
mod util;

pub use error::{Error, Result};
pub use graph::{Graph, GraphKind, VertexId};
