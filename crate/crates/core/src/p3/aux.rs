//! Auxiliary colored graph on `W` and the reduction rule driven by the rainbow oracle.

use crate::graph::{ColoredEdge, ColoredMultigraph, EdgeShape, UndirectedGraph};
use crate::rainbow::{rainbow_or_cover_with, verify_outcome, OracleConfig, OracleStats, Outcome};
use crate::report::RoundCase;

use super::{P3Buckets, P3Error, P3LocalizedPair, P3PartialDecomp, Role};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P3AuxGraph {
    pub graph: ColoredMultigraph,
    /// Local vertex index -> original id (the sorted `W`).
    pub w_ids: Vec<usize>,
    /// Color index -> original id: all of `C` ascending, then each `B_i` in bucket order.
    pub color_ids: Vec<usize>,
    /// Number of leading colors that come from `C`.
    pub c_colors: usize,
}

/// Loops `{v}` colored `u` for `u ∈ B_i, v ∈ W_i`; pairs `{v, w}` colored `c ∈ C` when `{c, v, w}` is an induced P3.
pub fn build_p3_aux(g: &UndirectedGraph, d: &P3PartialDecomp, buckets: &P3Buckets) -> P3AuxGraph {
    let w_ids = d.members(Role::W);
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in w_ids.iter().enumerate() {
        local[v] = i;
    }
    let mut color_ids = d.members(Role::C);
    let c_colors = color_ids.len();
    let mut edges = Vec::new();
    for (color, &c) in color_ids.iter().enumerate() {
        for (a, &v) in w_ids.iter().enumerate() {
            for &w in &w_ids[a + 1..] {
                if g.is_induced_p3(c, v, w) {
                    edges.push(ColoredEdge { shape: EdgeShape::pair(local[v], local[w]), color });
                }
            }
        }
    }
    for (i, bucket) in buckets.buckets.iter().enumerate() {
        for &u in bucket {
            let color = color_ids.len();
            color_ids.push(u);
            for &v in &buckets.w_parts[i] {
                edges.push(ColoredEdge { shape: EdgeShape::Loop(local[v]), color });
            }
        }
    }
    let graph = ColoredMultigraph::new(w_ids.len(), color_ids.len(), edges)
        .expect("a clean decomposition gives every color an edge");
    P3AuxGraph { graph, w_ids, color_ids, c_colors }
}

#[derive(Clone, Debug, PartialEq)]
pub enum P3RuleOutcome {
    Stop {
        kept: Vec<usize>,
        /// Color vertex -> the `W` vertices of its matching edge.
        mates: Vec<(usize, Vec<usize>)>,
    },
    Next {
        decomp: P3PartialDecomp,
        case: RoundCase,
    },
}

/// One application of the reduction rule to a clean decomposition.
pub fn apply_rule_p3(
    g: &UndirectedGraph,
    loc: &P3LocalizedPair,
    d: &P3PartialDecomp,
    buckets: &P3Buckets,
    cfg: &OracleConfig,
) -> Result<(P3RuleOutcome, OracleStats), P3Error> {
    let _ = loc;
    let aux = build_p3_aux(g, d, buckets);
    let (outcome, stats) = rainbow_or_cover_with(&aux.graph, d.epsilon, cfg);
    let check = verify_outcome(&aux.graph, &outcome);
    if !check.ok {
        return Err(P3Error::OracleContractViolation(format!("{:?}", check.violations)));
    }
    let result = match outcome {
        Outcome::Matching(m) => {
            let mut kept: Vec<usize> = (0..g.n()).filter(|&v| d.role[v] != Role::W).collect();
            let mut mates = Vec::with_capacity(m.edges.len());
            for (color, &e) in m.edges.iter().enumerate() {
                let ends: Vec<usize> = aux.graph.edge(e).shape.iter().map(|x| aux.w_ids[x]).collect();
                kept.extend_from_slice(&ends);
                mates.push((aux.color_ids[color], ends));
            }
            kept.sort_unstable();
            P3RuleOutcome::Stop { kept, mates }
        }
        Outcome::Cover(cc) => {
            let cover: Vec<usize> = cc.cover.iter().map(|&x| aux.w_ids[x]).collect();
            let (x_c, x_b): (Vec<usize>, Vec<usize>) = cc.colors.iter().partition(|&&col| col < aux.c_colors);
            let c1 = d.c1();
            if cover.len() as f64 > c1 * cc.colors.len() as f64 {
                return Err(P3Error::OracleContractViolation(format!(
                    "cover of size {} exceeds c1 * {} colors",
                    cover.len(),
                    cc.colors.len()
                )));
            }
            let mut next = d.clone();
            let case = if x_b.len() <= x_c.len() {
                for &v in &cover {
                    next.role[v] = Role::B;
                }
                for &col in &x_c {
                    next.role[aux.color_ids[col]] = Role::B;
                }
                RoundCase::Case1
            } else {
                for &col in &x_b {
                    let u = aux.color_ids[col];
                    let i = buckets.buckets.iter().position(|b| b.contains(&u)).expect("B color lies in a bucket");
                    for &v in &buckets.w_parts[i] {
                        next.role[v] = Role::B;
                    }
                }
                RoundCase::Case2
            };
            P3RuleOutcome::Next { decomp: next, case }
        }
    };
    Ok((result, stats))
}
