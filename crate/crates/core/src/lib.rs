//! Two-dimensional ranking of directed networks.
//!
//! Every node of a directed network gets two ranks: its PageRank index `K`,
//! computed from the Google matrix of the network, and its CheiRank index
//! `K*`, computed from the Google matrix of the network with all links
//! reversed. This crate builds both rankings with a sparse power iteration
//! and provides the statistics that describe the joint distribution of
//! nodes on the `(K, K*)` plane:
//!
//! - [`stats`]: the rank correlator `κ(τ)`, its per-node components, the
//!   point count `Δ(n)`, log-binned density grids, coarse-grained renders of
//!   the Google matrix and power-law exponent fits.
//! - [`flow`]: the average link-displacement field on the `(K, K*)` plane.
//! - [`spam`]: selective link inversion before computing CheiRank, and the
//!   closed-form model for the inverted-link fraction.
//! - [`twod`]: 2DRank ordering and subset-local ranks.
//!
//! Node ids are 1-based in all text formats and 0-based in memory.

pub mod error;
pub mod export;
pub mod flow;
pub mod google;
pub mod graph;
mod par;
pub mod spam;
pub mod stats;
pub mod table;
pub mod twod;

pub use error::{Error, Result};
pub use flow::{compute_flow, FlowAverage, FlowCell, FlowField};
pub use google::{
    cheirank, dense_solve_oracle, pagerank, rank_order, two_d_ranking, RankParams, RankVector,
    StochasticOperator, TwoDRanking,
};
pub use graph::{DirectedGraph, ParseOptions};
pub use stats::{DensityGrid, Histogram, Scale};
