//! Extended line graph of a colored multigraph and the independent transversal
//! dichotomy on partitioned graphs.

use thiserror::Error;

use crate::graph::{ColoredMultigraph, UndirectedGraph};

use super::{ColorCover, RainbowMatching};

/// A graph with a vertex partition into `parts` classes (classes may be empty).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionedGraph {
    pub graph: UndirectedGraph,
    pub part_of: Vec<usize>,
    pub parts: usize,
    /// Claw parameter; only 3 is exercised.
    pub claw: usize,
}

impl PartitionedGraph {
    pub fn members(&self, part: usize) -> Vec<usize> {
        (0..self.graph.n()).filter(|&v| self.part_of[v] == part).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransversalOutcome {
    /// `vertices[i]` is the chosen vertex of the i-th non-empty part (in part order).
    Transversal(Vec<usize>),
    Dominating {
        parts: Vec<usize>,
        dominating: Vec<usize>,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LineGraphError {
    #[error("vertex {center} has independent neighbors {leaves:?} in distinct parts")]
    NotClawFree { center: usize, leaves: [usize; 3] },
}

/// One vertex per edge of `g` (same index); two vertices are adjacent iff the edges
/// share an endpoint; part `i` holds the edges of color `i`.
pub fn build_extended_line_graph(g: &ColoredMultigraph) -> PartitionedGraph {
    let m = g.edges().len();
    let mut adj = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            if g.edge(i).shape.intersects(&g.edge(j).shape) {
                adj.push((i, j));
            }
        }
    }
    PartitionedGraph {
        graph: UndirectedGraph::from_edges(m, &adj).expect("line graph edges are simple"),
        part_of: g.edges().iter().map(|e| e.color).collect(),
        parts: g.colors(),
        claw: 3,
    }
}

fn check_claw_free(pg: &PartitionedGraph) -> Result<(), LineGraphError> {
    let g = &pg.graph;
    for v in 0..g.n() {
        let nb = g.neighbors(v);
        for (i, &a) in nb.iter().enumerate() {
            for (j, &b) in nb.iter().enumerate().skip(i + 1) {
                if g.has_edge(a, b) || pg.part_of[a] == pg.part_of[b] {
                    continue;
                }
                for &c in &nb[j + 1..] {
                    let distinct = pg.part_of[c] != pg.part_of[a] && pg.part_of[c] != pg.part_of[b];
                    if distinct && !g.has_edge(a, c) && !g.has_edge(b, c) {
                        return Err(LineGraphError::NotClawFree { center: v, leaves: [a, b, c] });
                    }
                }
            }
        }
    }
    Ok(())
}

fn transversal_rec(pg: &PartitionedGraph, classes: &[Vec<usize>], i: usize, chosen: &mut Vec<usize>) -> bool {
    if i == classes.len() {
        return true;
    }
    for &v in &classes[i] {
        if chosen.iter().all(|&u| !pg.graph.has_edge(u, v)) {
            chosen.push(v);
            if transversal_rec(pg, classes, i + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Smallest set of graph vertices whose closed neighborhoods cover `targets`, if at most `bound`.
fn min_dominating(pg: &PartitionedGraph, targets: &[usize], bound: usize) -> Option<Vec<usize>> {
    fn rec(pg: &PartitionedGraph, targets: &[usize], budget: usize, chosen: &mut Vec<usize>) -> bool {
        let g = &pg.graph;
        let open = targets.iter().find(|&&t| !chosen.iter().any(|&x| x == t || g.has_edge(x, t)));
        let Some(&t) = open else { return true };
        if budget == 0 {
            return false;
        }
        let mut options = vec![t];
        options.extend_from_slice(g.neighbors(t));
        for x in options {
            chosen.push(x);
            if rec(pg, targets, budget - 1, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    (0..=bound).find_map(|b| {
        let mut chosen = Vec::new();
        rec(pg, targets, b, &mut chosen).then_some(chosen)
    })
}

/// Exhaustive version of the dichotomy: an independent transversal of the non-empty
/// parts, or part indices `I` with a dominating set of size at most `(2+eps)(|I|-1)`.
pub fn independent_transversal_or_dominating(
    pg: &PartitionedGraph,
    eps: f64,
) -> Result<TransversalOutcome, LineGraphError> {
    check_claw_free(pg)?;
    let nonempty: Vec<usize> = (0..pg.parts).filter(|&p| pg.part_of.contains(&p)).collect();
    let classes: Vec<Vec<usize>> = nonempty.iter().map(|&p| pg.members(p)).collect();
    let mut chosen = Vec::new();
    if transversal_rec(pg, &classes, 0, &mut chosen) {
        return Ok(TransversalOutcome::Transversal(chosen));
    }
    let q = nonempty.len();
    for size in 1..=q {
        let bound = ((2.0 + eps) * (size as f64 - 1.0) + 1e-9).floor() as usize;
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            let targets: Vec<usize> = comb.iter().flat_map(|&i| classes[i].iter().copied()).collect();
            if let Some(dominating) = min_dominating(pg, &targets, bound) {
                let parts = comb.iter().map(|&i| nonempty[i]).collect();
                return Ok(TransversalOutcome::Dominating { parts, dominating });
            }
            // next combination
            let mut i = size;
            let advanced = loop {
                if i == 0 {
                    break false;
                }
                i -= 1;
                if comb[i] < q - size + i {
                    comb[i] += 1;
                    for j in i + 1..size {
                        comb[j] = comb[j - 1] + 1;
                    }
                    break true;
                }
            };
            if !advanced {
                break;
            }
        }
    }
    unreachable!("a graph without an independent transversal has a dominated part set")
}

/// Reads a transversal of the extended line graph back as a rainbow matching.
pub fn transversal_to_matching(g: &ColoredMultigraph, transversal: &[usize]) -> RainbowMatching {
    let mut edges = vec![usize::MAX; g.colors()];
    for &e in transversal {
        edges[g.edge(e).color] = e;
    }
    RainbowMatching { edges }
}

/// Endpoints of the dominating edges cover every edge whose color is in `parts`.
pub fn domination_to_cover(g: &ColoredMultigraph, parts: &[usize], dominating: &[usize], eps: f64) -> ColorCover {
    let mut cover: Vec<usize> = dominating.iter().flat_map(|&e| g.edge(e).shape.iter()).collect();
    cover.sort_unstable();
    cover.dedup();
    ColorCover { colors: parts.to_vec(), cover, epsilon: eps }
}

#[cfg(test)]
mod tests {
    use super::super::{exact::lemma_budget, verify_outcome, Outcome};
    use super::*;
    use crate::graph::{ColoredEdge, EdgeShape};
    use proptest::prelude::*;

    fn ce(shape: EdgeShape, color: usize) -> ColoredEdge {
        ColoredEdge { shape, color }
    }

    #[test]
    fn line_graph_examples() {
        let one = ColoredMultigraph::new(2, 1, vec![ce(EdgeShape::pair(0, 1), 0)]).unwrap();
        let pg = build_extended_line_graph(&one);
        assert_eq!((pg.graph.n(), pg.graph.edge_count(), pg.part_of.clone()), (1, 0, vec![0]));

        let loops = ColoredMultigraph::new(1, 2, vec![ce(EdgeShape::Loop(0), 0), ce(EdgeShape::Loop(0), 1)]).unwrap();
        let pg = build_extended_line_graph(&loops);
        assert_eq!(pg.graph.edges(), vec![(0, 1)]);

        let path = ColoredMultigraph::new(
            4,
            2,
            vec![ce(EdgeShape::pair(0, 1), 0), ce(EdgeShape::pair(1, 2), 1), ce(EdgeShape::pair(2, 3), 0)],
        )
        .unwrap();
        let pg = build_extended_line_graph(&path);
        assert_eq!(pg.graph.edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(pg.members(0), vec![0, 2]);
    }

    fn partitioned(n: usize, edges: &[(usize, usize)], part_of: Vec<usize>, parts: usize) -> PartitionedGraph {
        PartitionedGraph { graph: UndirectedGraph::from_edges(n, edges).unwrap(), part_of, parts, claw: 3 }
    }

    #[test]
    fn transversal_examples() {
        let free = partitioned(3, &[], vec![0, 1, 2], 3);
        assert_eq!(
            independent_transversal_or_dominating(&free, 1.0).unwrap(),
            TransversalOutcome::Transversal(vec![0, 1, 2])
        );

        let blocked = partitioned(2, &[(0, 1)], vec![0, 1], 2);
        match independent_transversal_or_dominating(&blocked, 1.0).unwrap() {
            TransversalOutcome::Dominating { parts, dominating } => {
                assert_eq!(parts, vec![0, 1]);
                assert!(dominating.len() <= 3 && dominating.iter().all(|&x| x < 2));
            }
            other => panic!("{other:?}"),
        }

        let claw = partitioned(4, &[(0, 1), (0, 2), (0, 3)], vec![0, 1, 2, 3], 4);
        assert_eq!(
            independent_transversal_or_dominating(&claw, 1.0),
            Err(LineGraphError::NotClawFree { center: 0, leaves: [1, 2, 3] })
        );
    }

    fn arb_small() -> impl Strategy<Value = ColoredMultigraph> {
        (1usize..=5, 1usize..=4).prop_flat_map(|(n, p)| {
            prop::collection::vec((0..n, 0..n, 0..p), 0..=8).prop_map(move |raw| {
                let mut edges: Vec<ColoredEdge> =
                    raw.into_iter().map(|(u, v, c)| ce(EdgeShape::pair(u, v), c)).collect();
                for c in 0..p {
                    edges.push(ce(EdgeShape::Loop((c * 3) % n), c));
                }
                let mut seen = std::collections::HashSet::new();
                edges.retain(|e| seen.insert((e.shape, e.color)));
                ColoredMultigraph::new(n, p, edges).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn translation_is_sound(g in arb_small(), eps in 0.1f64..1.0) {
            let pg = build_extended_line_graph(&g);
            match independent_transversal_or_dominating(&pg, eps / 2.0).unwrap() {
                TransversalOutcome::Transversal(t) => {
                    let m = transversal_to_matching(&g, &t);
                    prop_assert!(verify_outcome(&g, &Outcome::Matching(m)).ok);
                }
                TransversalOutcome::Dominating { parts, dominating } => {
                    let cc = domination_to_cover(&g, &parts, &dominating, eps);
                    prop_assert!(cc.cover.len() <= lemma_budget(eps, parts.len()));
                    prop_assert!(verify_outcome(&g, &Outcome::Cover(cc)).ok);
                }
            }
        }
    }
}
