//! Simulator and feasibility checker for relativistic information tasks.
//!
//! * [`geometry`]: exact causal order of integer spacetime points.
//! * [`task`]: summoning, two-wing bit and two-lab signalling tasks.
//! * [`lattice`]: 1+1-D lattice dynamics, transcripts and built-in strategies.
//! * [`search`]: exhaustive strategy enumeration and feasibility verdicts.
//! * [`token`]: classical summoning with a single unclonable token.
//! * [`scenario`], [`report`], [`demo`], [`commands`]: file format, output,
//!   built-in demos and the operations behind the CLI.

pub mod commands;
pub mod demo;
pub mod geometry;
pub mod lattice;
pub mod report;
pub mod scenario;
pub mod search;
pub mod symbol;
pub mod task;
pub mod token;

pub use geometry::{classify, earliest_arrival, precedes, strictly_precedes, CausalClass, Point};
pub use symbol::{Alphabet, Symbol};
