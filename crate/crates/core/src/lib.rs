//! Polynomial kernels built on a rainbow-matching oracle for four problems:
//! triangle packing and feedback vertex set in tournaments, and induced-P3
//! packing and hitting set in undirected graphs.
//!
//! Every kernel is an induced sub-instance on a kept vertex set `A`.

// Vertex ids double as indices into per-vertex tables.
#![allow(clippy::needless_range_loop)]

pub mod exact;
pub mod graph;
pub mod p3;
pub mod rainbow;
pub mod report;
pub mod solution;
pub mod tournament;
