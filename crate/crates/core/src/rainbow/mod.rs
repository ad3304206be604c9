//! Rainbow matching or small color cover.
//!
//! [`rainbow_or_cover`] always returns one of two certificates for a
//! `p`-edge-colored multigraph: a rainbow matching (one edge per color,
//! pairwise disjoint) or a non-empty color set `C` together with a vertex
//! cover `X` of the `C`-colored edges satisfying `|X| < (4 + eps)|C|`.
//!
//! The search is layered: greedy placement with bounded-depth augmentation,
//! then a blocked-color closure that either augments or certifies a cover of
//! size at most `2(|C| - 1)`, and an exhaustive fallback on small inputs.

mod exact;
mod line_graph;
mod search;

use serde::Serialize;

use crate::graph::{ColoredMultigraph, EdgeShape};

pub use exact::{exact_rainbow_matching, min_vertex_cover_at_most};
pub use line_graph::{
    build_extended_line_graph, domination_to_cover, independent_transversal_or_dominating, transversal_to_matching,
    LineGraphError, PartitionedGraph, TransversalOutcome,
};

/// `edges[c]` is the index (into `g.edges()`) of the edge chosen for color `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RainbowMatching {
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColorCover {
    pub colors: Vec<usize>,
    pub cover: Vec<usize>,
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Matching(RainbowMatching),
    Cover(ColorCover),
}

/// Which layer settled a call, plus work counters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OracleStats {
    pub layer: u8,
    pub colors: usize,
    pub edges: usize,
    pub augment_nodes: usize,
    pub closure_swaps: usize,
    pub exact_nodes: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleConfig {
    /// Depth of the augmenting swap search in layer 1.
    pub swap_depth: usize,
    /// Node budget per color for the augmenting search.
    pub augment_budget: usize,
    /// Swap budget for the blocked-color closure.
    pub closure_swaps: usize,
    /// The exhaustive layer runs before weaker fallbacks on inputs with at most
    /// this many vertices or at most `exact_color_limit` colors.
    pub exact_vertex_limit: usize,
    pub exact_color_limit: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            swap_depth: 3,
            augment_budget: 20_000,
            closure_swaps: 10_000,
            exact_vertex_limit: 20,
            exact_color_limit: 10,
        }
    }
}

/// Strict upper bound `(4 + eps) * colors` on the cover size.
pub fn cover_bound(eps: f64, colors: usize) -> f64 {
    (4.0 + eps) * colors as f64
}

pub fn rainbow_or_cover(g: &ColoredMultigraph, eps: f64) -> Outcome {
    rainbow_or_cover_with(g, eps, &OracleConfig::default()).0
}

pub fn rainbow_or_cover_with(g: &ColoredMultigraph, eps: f64, cfg: &OracleConfig) -> (Outcome, OracleStats) {
    assert!(eps > 0.0, "epsilon must be positive");
    search::layered(g, eps, cfg)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    MatchingSize { expected: usize, found: usize },
    EdgeOutOfRange { color: usize, edge: usize },
    WrongColor { color: usize, edge: usize },
    SharedVertex { colors: (usize, usize), vertex: usize },
    EmptyColorSet,
    ColorOutOfRange(usize),
    UncoveredEdge { edge: usize, shape: EdgeShape, color: usize },
    CoverTooLarge { size: usize, bound: f64 },
    NonPositiveEpsilon,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

pub fn verify_outcome(g: &ColoredMultigraph, outcome: &Outcome) -> Verification {
    let mut v = Vec::new();
    match outcome {
        Outcome::Matching(m) => {
            if m.edges.len() != g.colors() {
                v.push(Violation::MatchingSize { expected: g.colors(), found: m.edges.len() });
            }
            let mut owner = vec![usize::MAX; g.vertex_count()];
            for (c, &e) in m.edges.iter().enumerate() {
                if e >= g.edges().len() {
                    v.push(Violation::EdgeOutOfRange { color: c, edge: e });
                    continue;
                }
                let edge = g.edge(e);
                if edge.color != c {
                    v.push(Violation::WrongColor { color: c, edge: e });
                }
                for x in edge.shape.iter() {
                    if owner[x] != usize::MAX {
                        v.push(Violation::SharedVertex { colors: (owner[x], c), vertex: x });
                    }
                    owner[x] = c;
                }
            }
        }
        Outcome::Cover(cc) => {
            if cc.epsilon <= 0.0 {
                v.push(Violation::NonPositiveEpsilon);
            }
            if cc.colors.is_empty() {
                v.push(Violation::EmptyColorSet);
            }
            let mut in_cover = vec![false; g.vertex_count()];
            for &x in &cc.cover {
                if x < in_cover.len() {
                    in_cover[x] = true;
                }
            }
            let mut cover_len = cc.cover.clone();
            cover_len.sort_unstable();
            cover_len.dedup();
            for &c in &cc.colors {
                if c >= g.colors() {
                    v.push(Violation::ColorOutOfRange(c));
                    continue;
                }
                for &e in g.edges_of_color(c) {
                    let shape = g.edge(e).shape;
                    if !shape.iter().any(|x| in_cover[x]) {
                        v.push(Violation::UncoveredEdge { edge: e, shape, color: c });
                    }
                }
            }
            let mut colors = cc.colors.clone();
            colors.sort_unstable();
            colors.dedup();
            let bound = cover_bound(cc.epsilon, colors.len());
            if bound.is_nan() || cover_len.len() as f64 >= bound {
                v.push(Violation::CoverTooLarge { size: cover_len.len(), bound });
            }
        }
    }
    Verification { ok: v.is_empty(), violations: v }
}
