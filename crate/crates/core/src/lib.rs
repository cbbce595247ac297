//! Stable one- and two-color multi-matchings of marked random points on the
//! line and on the cycle.
//!
//! Points of one or two colors carry a number of stubs (half-edges). The
//! stable multi-matching links mutually closest compatible points until no
//! compatible pair with free stubs remains. This crate samples such
//! configurations, computes the matching with a round-based reference
//! procedure and a fast greedy closest-pair engine, analyzes the resulting
//! graph, checks structural properties of stable matchings, and runs
//! replicated percolation experiments on top of all that.

pub mod error;
pub mod graph;
pub mod harness;
pub mod matcher;
pub mod pointgen;
pub mod rng;
pub mod stats;
pub mod validators;

pub use error::{Error, Result};
pub use graph::{components, ComponentSummary, PointRole};
pub use matcher::{stable_match_greedy, stable_match_rounds, Edge, Matching};
pub use pointgen::{Color, ColorMode, Configuration, DegreeLaw, Geometry, MarkedPoint};
pub use validators::ViolationReport;
