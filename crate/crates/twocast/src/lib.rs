//! Capacity-region analysis and linear coding for two-unicast layered
//! deterministic networks.
//!
//! A layered deterministic network carries two unicast sessions,
//! `s1 -> d1` and `s2 -> d2`, through a layered DAG in which every node
//! broadcasts one symbol per time slot and receives the GF(2^r) sum of its
//! parents' transmissions. This crate answers two questions about such a
//! network, exactly:
//!
//! 1. **What is its capacity region?** [`classifier::classify`] reduces the
//!    network to graph structure — clone sets, vertex cuts, critical nodes,
//!    omniscient nodes — and names one of five regions (triangle, two
//!    trapezoids, pentagon, unit square). No sampling is involved; the
//!    answer is a theorem about the graph.
//! 2. **Can a concrete linear code hit a given corner of that region?**
//!    [`codesim::achieve`] builds the matching scheme (random linear coding
//!    plus targeted interference neutralization, zero-forcing, and
//!    decode-and-forward) over GF(2^r) and verifies decodability by rank.
//!    [`oracle`] cross-checks both answers by brute force on small
//!    instances.
//!
//! The modules build on each other in order: [`gf`] (field arithmetic),
//! [`netmodel`] (the graph and its file format), [`structure`] (cuts and
//! critical nodes), [`classifier`] (the region), [`codesim`] (schemes),
//! [`oracle`] (exhaustive search and fuzzing).
//!
//! See the crate examples for end-to-end tours; the `twocast` binary wraps
//! the same entry points for shell use.

#![forbid(unsafe_code)]

pub mod classifier;
pub mod codesim;
pub mod gf;
pub mod netmodel;
pub mod oracle;
pub mod structure;

pub use classifier::{classify, AnalysisReport, Classification, ConditionTrace, RatePair, RateRegion};
pub use gf::{FieldElem, Matrix};
pub use netmodel::{parse_network, NetError, Network, NodeId, NodeSet};
pub use structure::{critical_node, omniscient_nodes, primary_mincut, rank_mincut, CriticalNodeInfo, InducedGraph};
