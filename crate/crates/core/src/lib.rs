//! Community discovery in multidimensional (edge-labeled) networks.
//!
//! A multidimensional network connects the same set of nodes through several
//! kinds of edges ("dimensions"): conferences in a co-authorship graph,
//! services in a social graph, rank bins in a query log. This crate finds
//! communities that span dimensions by
//!
//! 1. splitting the network into one monodimensional graph per dimension,
//! 2. running a classical community discoverer on each slice,
//! 3. encoding every (dimension, community) membership as an item and each
//!    node as the transaction of its memberships, and
//! 4. mining frequent closed itemsets: each closed itemset, together with the
//!    nodes supporting it, is a multidimensional community.
//!
//! Because step 4 groups nodes by *shared memberships* rather than by direct
//! edges, a returned community may be unconnected in every dimension — a kind
//! of structure that collapse-based approaches cannot express.
//!
//! The crate also ships the surrounding toolkit: community density (MCD) and
//! connected-component metrics, a Hasse lattice over the mined itemsets,
//! filtering and cumulative-distribution statistics, exact set comparison
//! against a collapse baseline, and a seeded synthetic-network generator.
//!
//! Graph storage and the weighted algorithms are generic over the edge-weight
//! scalar (`f32`/`f64`) through [`Weight`]; [`Network`] is the common
//! double-precision alias.

pub mod community;
pub mod error;
pub mod fcim;
pub mod graph;
pub mod membership;
pub mod pipeline;
pub mod records;
pub mod synth;

use std::fmt;

pub use error::Error;

/// Convenience result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Edge-weight scalar: `f32` or `f64` (anything float-like with the usual
/// ordering, formatting, and thread-safety bounds).
pub trait Weight:
    num_traits::Float + num_traits::FromPrimitive + fmt::Debug + fmt::Display + Send + Sync
{
}

impl<T> Weight for T where
    T: num_traits::Float + num_traits::FromPrimitive + fmt::Debug + fmt::Display + Send + Sync
{
}

/// Double-precision multidimensional network, the default for the CLI.
pub type Network = graph::MultidimNetwork<f64>;

/// Single-precision multidimensional network, for memory-bound loads.
pub type Network32 = graph::MultidimNetwork<f32>;
