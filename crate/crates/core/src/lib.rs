//! Welded tree graphs, their black-box query oracles, sparse simulation of
//! register-model quantum query circuits on both the graph and its address
//! tree, and Monte Carlo experiments probing classical hardness.
//!
//! The pieces fit together like this. [`graph`] builds and validates
//! 3-edge-colored welded trees; [`permutation`] samples the weld
//! permutations the hardness experiments average over; [`oracle`] exposes
//! the metered per-color neighbor function over vertex labels. [`address`]
//! names walks from the entrance by their color sequences and resolves
//! them back to labels through the oracle. [`circuit`] and [`simulator`]
//! run the restricted gate set over sparse states in either register
//! model; [`decomposition`] splits runs into the parts that have and have
//! not met the exit or a near-cycle, and checks the exact identities
//! relating the two models. [`classical`] is the query-frugal classical
//! simulation built on all of that, and [`hardness`] and [`walk`] hold the
//! Monte Carlo experiments and the continuous-walk demo.

pub mod address;
pub mod circuit;
pub mod classical;
pub mod color;
mod coloring;
pub mod decomposition;
pub mod error;
pub mod fixtures;
pub mod generator;
pub mod graph;
pub mod hardness;
pub mod oracle;
pub mod parallel;
pub mod permutation;
pub mod rng;
pub mod simulator;
pub mod stats;
pub mod walk;

pub use address::{Address, AddressCodec};
pub use circuit::{Circuit, Gate};
pub use color::Color;
pub use error::{Error, Result};
pub use graph::{build_canonical, validate_raw, validate_welded_tree, RawGraph, Side, WeldedTree};
pub use oracle::{GraphView, Oracle, SpecialVertices};
pub use permutation::{apply_permutation, ColorPreservingPermutation};
pub use rng::RngStream;
pub use simulator::{BasisConfig, SimContext, SimOptions, Space, SparseState};
