//! Software-diversity allocation for power-grid security mechanisms.
//!
//! Pipeline: parse a bus system, group buses into substations, rate each
//! substation's impact, build the security graph from per-class templates,
//! color the mechanism graph with one of four allocators, then replay an
//! attacker over the colored graph.

pub mod attack;
pub mod coloring;
pub mod error;
pub mod grid_model;
pub mod impact;
pub mod security_graph;

pub use error::{Error, Result};
