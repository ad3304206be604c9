//! Exhaustive layer: exact rainbow-matching decision and the color-subset
//! cover search. Exponential; meant for small inputs.

use std::collections::HashSet;

use crate::graph::{ColoredMultigraph, EdgeShape};

use super::{ColorCover, RainbowMatching};

fn key(used: &[bool]) -> Vec<u64> {
    let mut words = vec![0u64; used.len().div_ceil(64)];
    for (i, &u) in used.iter().enumerate() {
        if u {
            words[i / 64] |= 1 << (i % 64);
        }
    }
    words
}

struct RainbowSearch<'a> {
    g: &'a ColoredMultigraph,
    order: Vec<usize>,
    used: Vec<bool>,
    chosen: Vec<usize>,
    failed: HashSet<(usize, Vec<u64>)>,
    nodes: usize,
}

impl RainbowSearch<'_> {
    fn free(&self, s: &EdgeShape) -> bool {
        s.iter().all(|x| !self.used[x])
    }

    fn rec(&mut self, i: usize) -> bool {
        if i == self.order.len() {
            return true;
        }
        self.nodes += 1;
        let state = (i, key(&self.used));
        if self.failed.contains(&state) {
            return false;
        }
        // Forward check: every remaining color still has a usable edge.
        for &c in &self.order[i + 1..] {
            if !self.g.edges_of_color(c).iter().any(|&e| self.free(&self.g.edge(e).shape)) {
                self.failed.insert(state);
                return false;
            }
        }
        let c = self.order[i];
        for &e in self.g.edges_of_color(c) {
            let shape = self.g.edge(e).shape;
            if !self.free(&shape) {
                continue;
            }
            shape.iter().for_each(|x| self.used[x] = true);
            self.chosen[c] = e;
            if self.rec(i + 1) {
                return true;
            }
            shape.iter().for_each(|x| self.used[x] = false);
        }
        self.failed.insert(state);
        false
    }
}

/// Exact decision; returns the matching (if any) and the number of search nodes.
pub fn exact_rainbow_matching(g: &ColoredMultigraph) -> (Option<RainbowMatching>, usize) {
    let mut order: Vec<usize> = (0..g.colors()).collect();
    order.sort_by_key(|&c| (g.edges_of_color(c).len(), c));
    let mut s = RainbowSearch {
        g,
        order,
        used: vec![false; g.vertex_count()],
        chosen: vec![usize::MAX; g.colors()],
        failed: HashSet::new(),
        nodes: 0,
    };
    let found = s.rec(0);
    (found.then(|| RainbowMatching { edges: s.chosen.clone() }), s.nodes)
}

fn greedy_matching_size(edges: &[(usize, usize)], taken: &mut Vec<usize>) -> usize {
    taken.clear();
    let mut size = 0;
    for &(u, v) in edges {
        if !taken.contains(&u) && !taken.contains(&v) {
            taken.push(u);
            taken.push(v);
            size += 1;
        }
    }
    size
}

fn vc_branch(edges: &[(usize, usize)], budget: usize, chosen: &mut Vec<usize>, scratch: &mut Vec<usize>) -> bool {
    let uncovered: Vec<(usize, usize)> =
        edges.iter().copied().filter(|&(u, v)| !chosen.contains(&u) && !chosen.contains(&v)).collect();
    let Some(&(u, v)) = uncovered.first() else { return true };
    if budget == 0 || greedy_matching_size(&uncovered, scratch) > budget {
        return false;
    }
    for x in [u, v] {
        chosen.push(x);
        if vc_branch(&uncovered, budget - 1, chosen, scratch) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// A minimum vertex cover of the given loops and pairs if its size is at most `bound`.
/// A loop at `v` forces `v` into the cover.
pub fn min_vertex_cover_at_most(loops: &[usize], pairs: &[(usize, usize)], bound: usize) -> Option<Vec<usize>> {
    let mut base: Vec<usize> = loops.to_vec();
    base.sort_unstable();
    base.dedup();
    if base.len() > bound {
        return None;
    }
    let rest: Vec<(usize, usize)> = pairs
        .iter()
        .copied()
        .filter(|(u, v)| base.binary_search(u).is_err() && base.binary_search(v).is_err())
        .collect();
    let mut scratch = Vec::new();
    for budget in 0..=bound - base.len() {
        let mut chosen = Vec::new();
        if vc_branch(&rest, budget, &mut chosen, &mut scratch) {
            base.extend(chosen);
            base.sort_unstable();
            return Some(base);
        }
    }
    None
}

pub(crate) fn split_edges(g: &ColoredMultigraph, colors: &[usize]) -> (Vec<usize>, Vec<(usize, usize)>) {
    let mut loops = Vec::new();
    let mut pairs = Vec::new();
    for &c in colors {
        for &e in g.edges_of_color(c) {
            match g.edge(e).shape {
                EdgeShape::Loop(v) => loops.push(v),
                EdgeShape::Pair(u, v) => pairs.push((u, v)),
            }
        }
    }
    (loops, pairs)
}

/// Endpoints of a maximal matching plus all loop vertices: a 2-approximate cover.
pub(crate) fn approx_cover(loops: &[usize], pairs: &[(usize, usize)]) -> Vec<usize> {
    let mut inside = std::collections::BTreeSet::new();
    inside.extend(loops.iter().copied());
    for &(u, v) in pairs {
        if !inside.contains(&u) && !inside.contains(&v) {
            inside.insert(u);
            inside.insert(v);
        }
    }
    inside.into_iter().collect()
}

fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    for i in (0..k).rev() {
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Largest integer cover size allowed for `colors` colors: `(4 + eps)(colors - 1)`.
pub(crate) fn lemma_budget(eps: f64, colors: usize) -> usize {
    ((4.0 + eps) * (colors as f64 - 1.0) + 1e-9).floor().max(0.0) as usize
}

/// First color subset, by increasing size then lexicographically, whose edges have a
/// vertex cover of size at most `(4 + eps)(|C| - 1)`.
pub(crate) fn exact_cover(g: &ColoredMultigraph, eps: f64) -> Option<ColorCover> {
    let p = g.colors();
    for size in 1..=p {
        let budget = lemma_budget(eps, size);
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            let (loops, pairs) = split_edges(g, &comb);
            let approx = approx_cover(&loops, &pairs);
            let found =
                if approx.len() <= budget { Some(approx) } else { min_vertex_cover_at_most(&loops, &pairs, budget) };
            if let Some(cover) = found {
                return Some(ColorCover { colors: comb, cover, epsilon: eps });
            }
            if !next_combination(&mut comb, p) {
                break;
            }
        }
    }
    None
}
