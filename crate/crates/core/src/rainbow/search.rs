use std::collections::HashSet;

use crate::graph::{ColoredMultigraph, EdgeShape};

use super::exact::{
    approx_cover, exact_cover, exact_rainbow_matching, lemma_budget, min_vertex_cover_at_most, split_edges,
};
use super::{cover_bound, ColorCover, OracleConfig, OracleStats, Outcome, RainbowMatching};

const NONE: usize = usize::MAX;

enum Undo {
    Owner(usize, usize),
    Chosen(usize, usize),
}

/// Partial rainbow matching with an undo log.
struct Partial<'a> {
    g: &'a ColoredMultigraph,
    owner: Vec<usize>,
    chosen: Vec<usize>,
    log: Vec<Undo>,
    locked: Vec<u32>,
    nodes: usize,
}

enum Closure {
    Augmented,
    Cover(Vec<usize>, Vec<usize>),
    Stuck(Vec<usize>),
}

impl<'a> Partial<'a> {
    fn new(g: &'a ColoredMultigraph) -> Self {
        Self {
            g,
            owner: vec![NONE; g.vertex_count()],
            chosen: vec![NONE; g.colors()],
            log: Vec::new(),
            locked: vec![0; g.vertex_count()],
            nodes: 0,
        }
    }

    fn shape(&self, e: usize) -> EdgeShape {
        self.g.edge(e).shape
    }

    fn set_owner(&mut self, v: usize, c: usize) {
        self.log.push(Undo::Owner(v, self.owner[v]));
        self.owner[v] = c;
    }

    fn assign(&mut self, c: usize, e: usize) {
        self.log.push(Undo::Chosen(c, self.chosen[c]));
        self.chosen[c] = e;
        for v in self.shape(e).iter() {
            self.set_owner(v, c);
        }
    }

    fn unassign(&mut self, c: usize) {
        let e = self.chosen[c];
        for v in self.shape(e).iter() {
            self.set_owner(v, NONE);
        }
        self.log.push(Undo::Chosen(c, e));
        self.chosen[c] = NONE;
    }

    fn rollback(&mut self, mark: usize) {
        while self.log.len() > mark {
            match self.log.pop().expect("log longer than mark") {
                Undo::Owner(v, old) => self.owner[v] = old,
                Undo::Chosen(c, old) => self.chosen[c] = old,
            }
        }
    }

    fn blockers(&self, e: usize) -> ([usize; 2], usize) {
        let mut out = [NONE; 2];
        let mut k = 0;
        for v in self.shape(e).iter() {
            let o = self.owner[v];
            if o != NONE && !out[..k].contains(&o) {
                out[k] = o;
                k += 1;
            }
        }
        (out, k)
    }

    fn touches_locked(&self, e: usize) -> bool {
        self.shape(e).iter().any(|v| self.locked[v] > 0)
    }

    fn lock(&mut self, e: usize, delta: i32) {
        for v in self.shape(e).iter() {
            self.locked[v] = (self.locked[v] as i32 + delta) as u32;
        }
    }

    /// Places `c`, displacing at most two colors per level and re-placing them recursively.
    fn try_place(&mut self, c: usize, depth: usize, budget: &mut usize) -> bool {
        let g = self.g;
        for &e in g.edges_of_color(c) {
            if !self.touches_locked(e) && self.blockers(e).1 == 0 {
                self.assign(c, e);
                return true;
            }
        }
        if depth == 0 {
            return false;
        }
        for &e in g.edges_of_color(c) {
            if self.touches_locked(e) {
                continue;
            }
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            self.nodes += 1;
            let (bl, k) = self.blockers(e);
            let mark = self.log.len();
            for &b in &bl[..k] {
                self.unassign(b);
            }
            self.assign(c, e);
            self.lock(e, 1);
            let mut ok = true;
            for &b in &bl[..k] {
                if !self.try_place(b, depth - 1, budget) {
                    ok = false;
                    break;
                }
            }
            self.lock(e, -1);
            if ok {
                return true;
            }
            self.rollback(mark);
        }
        false
    }

    /// Grows a set of colors around the unplaced color `c` until every edge of the set
    /// meets the vertices matched to the set, swapping colors onto free edges on the way.
    fn closure(&mut self, c: usize, swap_cap: usize, swaps: &mut usize) -> Closure {
        let g = self.g;
        let mut tabu: HashSet<(usize, usize)> = HashSet::new();
        'restart: loop {
            let mut in_set = vec![false; g.colors()];
            let mut covered = vec![false; g.vertex_count()];
            let mut members = vec![c];
            in_set[c] = true;
            let mut stuck = false;
            let mut i = 0;
            while i < members.len() {
                let a = members[i];
                i += 1;
                for &e in g.edges_of_color(a) {
                    let shape = self.shape(e);
                    if shape.iter().any(|v| covered[v]) {
                        continue;
                    }
                    let (bl, k) = self.blockers(e);
                    if k == 0 {
                        if a == c {
                            self.assign(c, e);
                            return Closure::Augmented;
                        }
                        if *swaps < swap_cap && tabu.insert((a, e)) {
                            *swaps += 1;
                            self.unassign(a);
                            self.assign(a, e);
                            continue 'restart;
                        }
                        stuck = true;
                        continue;
                    }
                    for &b in &bl[..k] {
                        if !in_set[b] {
                            in_set[b] = true;
                            members.push(b);
                            for v in self.shape(self.chosen[b]).iter() {
                                covered[v] = true;
                            }
                        }
                    }
                }
            }
            if stuck {
                return Closure::Stuck(members);
            }
            let cover = (0..g.vertex_count()).filter(|&v| covered[v]).collect();
            members.sort_unstable();
            return Closure::Cover(members, cover);
        }
    }
}

/// Tries to shrink a known-valid cover of the `colors` edges.
fn tighten(g: &ColoredMultigraph, colors: &[usize], cover: Vec<usize>) -> Vec<usize> {
    let (loops, pairs) = split_edges(g, colors);
    let approx = approx_cover(&loops, &pairs);
    let mut best = if approx.len() < cover.len() { approx } else { cover };
    if best.len() <= 12 && !best.is_empty() {
        if let Some(exact) = min_vertex_cover_at_most(&loops, &pairs, best.len() - 1) {
            best = exact;
        }
    }
    best
}

pub(super) fn layered(g: &ColoredMultigraph, eps: f64, cfg: &OracleConfig) -> (Outcome, OracleStats) {
    let mut stats = OracleStats { colors: g.colors(), edges: g.edges().len(), ..Default::default() };
    if g.colors() == 0 {
        stats.layer = 1;
        return (Outcome::Matching(RainbowMatching { edges: vec![] }), stats);
    }
    let small = g.vertex_count() <= cfg.exact_vertex_limit || g.colors() <= cfg.exact_color_limit;

    // Layer 1.
    let mut part = Partial::new(g);
    let mut order: Vec<usize> = (0..g.colors()).collect();
    order.sort_by_key(|&c| (g.edges_of_color(c).len(), c));
    let mut unplaced = Vec::new();
    for &c in &order {
        let mut budget = cfg.augment_budget;
        if !part.try_place(c, cfg.swap_depth, &mut budget) {
            unplaced.push(c);
        }
        part.log.clear();
    }
    stats.augment_nodes = part.nodes;
    if unplaced.is_empty() {
        stats.layer = 1;
        return (Outcome::Matching(RainbowMatching { edges: part.chosen }), stats);
    }

    // Layer 2.
    let mut swaps = 0;
    let mut stuck_sets = Vec::new();
    let mut queue = unplaced;
    while let Some(c) = queue.pop() {
        match part.closure(c, cfg.closure_swaps, &mut swaps) {
            Closure::Augmented => {
                part.log.clear();
                continue;
            }
            Closure::Cover(colors, cover) => {
                stats.closure_swaps = swaps;
                stats.layer = 2;
                let cover = tighten(g, &colors, cover);
                return (Outcome::Cover(ColorCover { colors, cover, epsilon: eps }), stats);
            }
            Closure::Stuck(members) => {
                part.log.clear();
                stuck_sets.push(members);
                // Leave c unplaced; another color's closure may still certify a cover.
            }
        }
    }
    stats.closure_swaps = swaps;
    if stuck_sets.is_empty() {
        stats.layer = 2;
        return (Outcome::Matching(RainbowMatching { edges: part.chosen }), stats);
    }

    // Layer 3 on small inputs keeps the stronger (4+eps)(|C|-1) form.
    if small {
        return exhaustive(g, eps, stats);
    }
    for mut colors in stuck_sets.into_iter().chain(std::iter::once((0..g.colors()).collect())) {
        colors.sort_unstable();
        colors.dedup();
        let (loops, pairs) = split_edges(g, &colors);
        let cover = approx_cover(&loops, &pairs);
        let strong = cover.len() <= lemma_budget(eps, colors.len());
        if strong || (cover.len() as f64) < cover_bound(eps, colors.len()) {
            stats.layer = 2;
            return (Outcome::Cover(ColorCover { colors, cover, epsilon: eps }), stats);
        }
    }
    exhaustive(g, eps, stats)
}

fn exhaustive(g: &ColoredMultigraph, eps: f64, mut stats: OracleStats) -> (Outcome, OracleStats) {
    stats.layer = 3;
    let (found, nodes) = exact_rainbow_matching(g);
    stats.exact_nodes = nodes;
    if let Some(m) = found {
        return (Outcome::Matching(m), stats);
    }
    let cc = exact_cover(g, eps).unwrap_or_else(|| {
        // Reaching this line would contradict the existence theorem behind the oracle.
        panic!("no rainbow matching and no color subset with a small cover:\n{}", g.to_dump())
    });
    (Outcome::Cover(cc), stats)
}

#[cfg(test)]
mod tests {
    use super::super::{rainbow_or_cover, rainbow_or_cover_with, verify_outcome};
    use super::*;
    use crate::graph::ColoredEdge;
    use proptest::prelude::*;

    fn arb_graph(max_v: usize, max_c: usize) -> impl Strategy<Value = ColoredMultigraph> {
        (1..=max_v, 1..=max_c).prop_flat_map(|(n, p)| {
            prop::collection::vec((0..n, 0..n, 0..p), p..=3 * p + 4).prop_map(move |raw| {
                let mut edges: Vec<ColoredEdge> =
                    raw.into_iter().map(|(u, v, c)| ColoredEdge { shape: EdgeShape::pair(u, v), color: c }).collect();
                // Guarantee surjectivity, then drop same-color parallels.
                for c in 0..p {
                    edges.push(ColoredEdge { shape: EdgeShape::Loop(c % n), color: c });
                }
                let mut seen = HashSet::new();
                edges.retain(|e| seen.insert((e.shape, e.color)));
                ColoredMultigraph::new(n, p, edges).unwrap()
            })
        })
    }

    #[test]
    fn augmentation_displaces_blockers() {
        // Color 0 grabs loop(0) first; color 1 only has loop(0), so color 0 must move to loop(1).
        let e = |s, c| ColoredEdge { shape: s, color: c };
        let g = ColoredMultigraph::new(
            2,
            2,
            vec![e(EdgeShape::Loop(0), 0), e(EdgeShape::Loop(1), 0), e(EdgeShape::Loop(0), 1)],
        )
        .unwrap();
        let out = rainbow_or_cover(&g, 1.0);
        assert!(matches!(out, Outcome::Matching(_)));
        assert!(verify_outcome(&g, &out).ok);
    }

    #[test]
    fn closure_without_exact_layer_certifies() {
        // Three colors of loops competing for two vertices.
        let e = |v, c| ColoredEdge { shape: EdgeShape::Loop(v), color: c };
        let g = ColoredMultigraph::new(2, 3, vec![e(0, 0), e(1, 0), e(0, 1), e(1, 1), e(0, 2), e(1, 2)]).unwrap();
        let cfg = OracleConfig { exact_vertex_limit: 0, exact_color_limit: 0, ..OracleConfig::default() };
        let (out, stats) = rainbow_or_cover_with(&g, 1.0, &cfg);
        assert_eq!(stats.layer, 2);
        assert!(verify_outcome(&g, &out).ok);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn outcome_always_verifies(g in arb_graph(8, 6), eps in 0.05f64..2.0) {
            let out = rainbow_or_cover(&g, eps);
            prop_assert!(verify_outcome(&g, &out).ok, "{:?}", verify_outcome(&g, &out));
        }

        #[test]
        fn non_exact_layers_still_verify(g in arb_graph(12, 8)) {
            let cfg = OracleConfig { exact_vertex_limit: 0, exact_color_limit: 0, ..OracleConfig::default() };
            let (out, _) = rainbow_or_cover_with(&g, 1.0, &cfg);
            prop_assert!(verify_outcome(&g, &out).ok);
        }
    }
}
