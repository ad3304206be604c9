//! Linear kernel for induced-P3 packing and hitting set.
//!
//! The vertex set is split into `W` (inside the P3-free remainder of a greedy
//! packing), `B` (kept unconditionally) and `C` (packing vertices still
//! interacting with `W`). Each round asks the rainbow oracle about an auxiliary
//! colored graph on `W` and either stops or moves vertices out of `W`/`C`.

mod aux;
mod kernel;

use thiserror::Error;

use crate::graph::UndirectedGraph;

pub use aux::{apply_rule_p3, build_p3_aux, P3AuxGraph, P3RuleOutcome};
pub use kernel::{
    kernelize_p3, kernelize_p3_observed, lift_hitting_set_p3, p3_bound, restructure_packing_p3, P3FinalState,
    P3KernelResult,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    W,
    B,
    C,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum P3Error {
    #[error("not a nice pair: induced P3 {witness:?} has two vertices in W")]
    NotNicePair { witness: [usize; 3] },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("oracle returned an invalid certificate: {0}")]
    OracleContractViolation(String),
    #[error("invariant violated after round {round}: {details:?}")]
    InvariantViolation { round: usize, details: Vec<String> },
    #[error("invalid solution: {0}")]
    InvalidSolution(String),
}

/// A maximal greedy packing and the cliques of the P3-free remainder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P3LocalizedPair {
    pub packing: Vec<[usize; 3]>,
    pub c0: Vec<usize>,
    /// Connected components of `G - C0`, each a clique, ordered by smallest vertex.
    pub cliques: Vec<Vec<usize>>,
    clique_of: Vec<Option<usize>>,
}

impl P3LocalizedPair {
    /// Builds the pair for an explicit packing; fails if the remainder is not a disjoint union of cliques.
    pub fn new(g: &UndirectedGraph, packing: Vec<[usize; 3]>) -> Result<Self, P3Error> {
        let n = g.n();
        let mut in_c0 = vec![false; n];
        for t in &packing {
            for &v in t {
                if in_c0[v] {
                    return Err(P3Error::Precondition(format!("packing reuses vertex {v}")));
                }
                in_c0[v] = true;
            }
        }
        let mut clique_of = vec![None; n];
        let mut cliques: Vec<Vec<usize>> = Vec::new();
        for s in 0..n {
            if in_c0[s] || clique_of[s].is_some() {
                continue;
            }
            let id = cliques.len();
            let mut comp = vec![s];
            clique_of[s] = Some(id);
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &v in g.neighbors(u) {
                    if !in_c0[v] && clique_of[v].is_none() {
                        clique_of[v] = Some(id);
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            for (a, &u) in comp.iter().enumerate() {
                for &v in &comp[a + 1..] {
                    if !g.has_edge(u, v) {
                        return Err(P3Error::Precondition(format!(
                            "remainder component containing {u} and {v} is not a clique"
                        )));
                    }
                }
            }
            cliques.push(comp);
        }
        let c0 = (0..n).filter(|&v| in_c0[v]).collect();
        Ok(Self { packing, c0, cliques, clique_of })
    }

    pub fn clique_of(&self, v: usize) -> Option<usize> {
        self.clique_of[v]
    }
}

pub enum P3Localization {
    /// The greedy packing reached the requested number of paths.
    Reached(Vec<[usize; 3]>),
    Pair(P3LocalizedPair),
}

/// Greedy maximal packing over triples in lexicographic order, stopping at `target` paths.
pub fn greedy_localize_p3(g: &UndirectedGraph, target: usize) -> P3Localization {
    let n = g.n();
    let mut used = vec![false; n];
    let mut packing = Vec::new();
    if target == 0 {
        return P3Localization::Reached(packing);
    }
    for a in 0..n {
        for b in a + 1..n {
            if used[a] {
                break;
            }
            if used[b] {
                continue;
            }
            for c in b + 1..n {
                if !used[c] && g.is_induced_p3(a, b, c) {
                    used[a] = true;
                    used[b] = true;
                    used[c] = true;
                    packing.push([a, b, c]);
                    if packing.len() == target {
                        return P3Localization::Reached(packing);
                    }
                    break;
                }
            }
        }
    }
    P3Localization::Pair(P3LocalizedPair::new(g, packing).expect("a maximal packing leaves a cluster graph"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct P3PartialDecomp {
    pub role: Vec<Role>,
    pub epsilon: f64,
}

impl P3PartialDecomp {
    /// `(W0, {}, C0)`.
    pub fn initial(loc: &P3LocalizedPair, n: usize, epsilon: f64) -> Self {
        let mut role = vec![Role::W; n];
        for &v in &loc.c0 {
            role[v] = Role::C;
        }
        Self { role, epsilon }
    }

    pub fn c1(&self) -> f64 {
        4.0 + self.epsilon
    }

    pub fn members(&self, r: Role) -> Vec<usize> {
        (0..self.role.len()).filter(|&v| self.role[v] == r).collect()
    }
}

/// Bucket structure of a nice pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P3Buckets {
    /// `W_i = W ∩ W0_i`, one entry per clique.
    pub w_parts: Vec<Vec<usize>>,
    /// `B_i`: vertices of `B` whose `W`-neighborhood is exactly `W_i`.
    pub buckets: Vec<Vec<usize>>,
    /// `B` vertices with no neighbor in `W`.
    pub b_empty: Vec<usize>,
}

impl P3Buckets {
    /// Indices of non-empty `W_i`.
    pub fn f_bar(&self) -> Vec<usize> {
        (0..self.w_parts.len()).filter(|&i| !self.w_parts[i].is_empty()).collect()
    }

    pub fn b_nonempty(&self) -> usize {
        self.buckets.iter().map(Vec::len).sum()
    }

    /// `|B_∅|/(1+2c1) + |B_≠∅|`.
    pub fn size_value(&self, c1: f64) -> f64 {
        self.b_empty.len() as f64 / (1.0 + 2.0 * c1) + self.b_nonempty() as f64
    }
}

/// The unique bucket decomposition of `(w, b)`, or an induced P3 with two vertices in `w`.
pub fn bucket_decompose_p3(
    g: &UndirectedGraph,
    loc: &P3LocalizedPair,
    w: &[usize],
    b: &[usize],
) -> Result<P3Buckets, P3Error> {
    let n = g.n();
    let mut in_w = vec![false; n];
    let mut w_parts = vec![Vec::new(); loc.cliques.len()];
    for &v in w {
        let Some(i) = loc.clique_of(v) else {
            return Err(P3Error::Precondition(format!("W vertex {v} is not in the remainder")));
        };
        in_w[v] = true;
        w_parts[i].push(v);
    }
    for part in &mut w_parts {
        part.sort_unstable();
    }
    let mut buckets = vec![Vec::new(); loc.cliques.len()];
    let mut b_empty = Vec::new();
    for &v in b {
        if in_w[v] {
            return Err(P3Error::Precondition(format!("vertex {v} is in both W and B")));
        }
        let nw: Vec<usize> = g.neighbors(v).iter().copied().filter(|&u| in_w[u]).collect();
        let Some(&first) = nw.first() else {
            b_empty.push(v);
            continue;
        };
        let i = loc.clique_of(first).expect("W vertices lie in cliques");
        if let Some(&other) = nw.iter().find(|&&u| loc.clique_of(u) != Some(i)) {
            // Two W-neighbors in different cliques are non-adjacent.
            return Err(P3Error::NotNicePair { witness: sorted([first, v, other]) });
        }
        if nw.len() != w_parts[i].len() {
            let missing = *w_parts[i].iter().find(|u| !nw.contains(u)).expect("a non-neighbor exists");
            return Err(P3Error::NotNicePair { witness: sorted([v, first, missing]) });
        }
        buckets[i].push(v);
    }
    for bucket in &mut buckets {
        bucket.sort_unstable();
    }
    b_empty.sort_unstable();
    Ok(P3Buckets { w_parts, buckets, b_empty })
}

fn sorted(mut t: [usize; 3]) -> [usize; 3] {
    t.sort_unstable();
    t
}

/// Whether `x` forms an induced P3 with two vertices of `W`.
pub fn forms_p3_with_w(
    g: &UndirectedGraph,
    loc: &P3LocalizedPair,
    w_parts: &[Vec<usize>],
    in_w: &[bool],
    x: usize,
) -> bool {
    let nw: Vec<usize> = g.neighbors(x).iter().copied().filter(|&u| in_w[u]).collect();
    let Some(&first) = nw.first() else { return false };
    let i = loc.clique_of(first).expect("W vertices lie in cliques");
    nw.iter().any(|&u| loc.clique_of(u) != Some(i)) || nw.len() != w_parts[i].len()
}

/// Moves every `C` vertex that forms no induced P3 with two `W` vertices into `B`.
pub fn clean_p3(g: &UndirectedGraph, loc: &P3LocalizedPair, d: &P3PartialDecomp) -> (P3PartialDecomp, Vec<usize>) {
    let in_w: Vec<bool> = d.role.iter().map(|&r| r == Role::W).collect();
    let mut w_parts = vec![Vec::new(); loc.cliques.len()];
    for v in d.members(Role::W) {
        w_parts[loc.clique_of(v).expect("W in remainder")].push(v);
    }
    let mut out = d.clone();
    let mut moved = Vec::new();
    for x in d.members(Role::C) {
        if !forms_p3_with_w(g, loc, &w_parts, &in_w, x) {
            out.role[x] = Role::B;
            moved.push(x);
        }
    }
    (out, moved)
}

/// Full invariant check; returns the bucket structure when everything holds.
pub fn validate_p3(g: &UndirectedGraph, loc: &P3LocalizedPair, d: &P3PartialDecomp) -> Result<P3Buckets, Vec<String>> {
    let mut errs = Vec::new();
    if d.role.len() != g.n() {
        return Err(vec![format!("role vector has length {} for n = {}", d.role.len(), g.n())]);
    }
    let in_c0: Vec<bool> = (0..g.n()).map(|v| loc.clique_of(v).is_none()).collect();
    for v in 0..g.n() {
        match d.role[v] {
            Role::W if in_c0[v] => errs.push(format!("W vertex {v} lies in C0")),
            Role::C if !in_c0[v] => errs.push(format!("C vertex {v} lies outside C0")),
            _ => {}
        }
    }
    let w = d.members(Role::W);
    let b = d.members(Role::B);
    let buckets = match bucket_decompose_p3(g, loc, &w, &b) {
        Ok(bk) => bk,
        Err(e) => {
            errs.push(e.to_string());
            return Err(errs);
        }
    };
    for (i, part) in buckets.w_parts.iter().enumerate() {
        if part.is_empty() && !buckets.buckets[i].is_empty() {
            errs.push(format!("bucket {i} is non-empty while W_{i} is empty"));
        }
    }
    // Brute-force niceness on small inputs, independent of the bucket argument.
    let scope: Vec<usize> = w.iter().chain(&b).copied().collect();
    if scope.len() <= 60 {
        for t in crate::graph::enumerate_induced_p3(g, &scope) {
            if t.iter().filter(|&&x| d.role[x] == Role::W).count() >= 2 {
                errs.push(format!("induced P3 {t:?} has two W vertices"));
            }
        }
    }
    let c1 = d.c1();
    let c_less = loc.c0.iter().filter(|&&v| d.role[v] != Role::C).count();
    let s = buckets.size_value(c1);
    if s > (1.0 + 2.0 * c1) * c_less as f64 + 1e-9 {
        errs.push(format!("size {s} exceeds (1+2c1)|C0 \\ C| = {}", (1.0 + 2.0 * c1) * c_less as f64));
    }
    if errs.is_empty() {
        Ok(buckets)
    } else {
        Err(errs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, e: &[(usize, usize)]) -> UndirectedGraph {
        UndirectedGraph::from_edges(n, e).unwrap()
    }

    #[test]
    fn localization_examples() {
        let k5 = g(5, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
        let P3Localization::Pair(pair) = greedy_localize_p3(&k5, 1) else { panic!() };
        assert!(pair.c0.is_empty());
        assert_eq!(pair.cliques, vec![vec![0, 1, 2, 3, 4]]);

        let path = g(3, &[(0, 1), (1, 2)]);
        assert!(matches!(greedy_localize_p3(&path, 1), P3Localization::Reached(p) if p == vec![[0, 1, 2]]));

        let star = g(4, &[(0, 1), (0, 2), (0, 3)]);
        let P3Localization::Pair(pair) = greedy_localize_p3(&star, 2) else { panic!() };
        assert_eq!(pair.c0, vec![0, 1, 2]);
        assert_eq!(pair.cliques, vec![vec![3]]);
    }

    #[test]
    fn bucket_examples() {
        // Remainder cliques {0,1,2} and {6}; packing path 3-4-5.
        let graph = g(7, &[(0, 1), (2, 0), (2, 1), (3, 4), (4, 5)]);
        let loc = P3LocalizedPair::new(&graph, vec![[3, 4, 5]]).unwrap();
        assert_eq!(loc.cliques, vec![vec![0, 1, 2], vec![6]]);

        let all = bucket_decompose_p3(&graph, &loc, &[0, 1, 2, 6], &[]).unwrap();
        assert!(all.buckets.iter().all(Vec::is_empty) && all.b_empty.is_empty());

        let bk = bucket_decompose_p3(&graph, &loc, &[0, 1, 6], &[2]).unwrap();
        assert_eq!(bk.w_parts, vec![vec![0, 1], vec![6]]);
        assert_eq!(bk.buckets, vec![vec![2], vec![]]);
        assert!(bk.b_empty.is_empty());

        let bk = bucket_decompose_p3(&graph, &loc, &[0, 1], &[3, 6]).unwrap();
        assert_eq!(bk.b_empty, vec![3, 6]);
        assert!(P3LocalizedPair::new(&g(3, &[(0, 1), (1, 2)]), vec![]).is_err());
    }

    #[test]
    fn nice_pair_failure_witness() {
        // Remainder cliques {0,1} and {5}; 2 is a C0 vertex joined only to 0.
        let graph = g(6, &[(0, 1), (2, 0), (2, 3), (3, 4)]);
        let loc = P3LocalizedPair::new(&graph, vec![[2, 3, 4]]).unwrap();
        assert_eq!(loc.cliques, vec![vec![0, 1], vec![5]]);
        assert_eq!(bucket_decompose_p3(&graph, &loc, &[0, 1], &[2]), Err(P3Error::NotNicePair { witness: [0, 1, 2] }));
        // Joined to two cliques: 0 and 5.
        let graph = g(6, &[(0, 1), (2, 0), (2, 5), (2, 3), (3, 4)]);
        let loc = P3LocalizedPair::new(&graph, vec![[2, 3, 4]]).unwrap();
        assert_eq!(
            bucket_decompose_p3(&graph, &loc, &[0, 1, 5], &[2]),
            Err(P3Error::NotNicePair { witness: [0, 2, 5] })
        );
    }

    #[test]
    fn cleaning_moves_isolated_c_vertices() {
        // Packing {2,3,4} (path 2-3-4); vertex 4 is isolated from W = {0,1}; 2 sees only 0.
        let graph = g(5, &[(0, 1), (2, 0), (2, 3), (3, 4)]);
        let loc = P3LocalizedPair::new(&graph, vec![[2, 3, 4]]).unwrap();
        let d = P3PartialDecomp::initial(&loc, 5, 1.0);
        let (clean, moved) = clean_p3(&graph, &loc, &d);
        assert_eq!(moved, vec![3, 4]);
        assert_eq!(clean.members(Role::C), vec![2]);
        let (again, moved) = clean_p3(&graph, &loc, &clean);
        assert!(moved.is_empty());
        assert_eq!(again, clean);
        assert!(validate_p3(&graph, &loc, &clean).is_ok());
    }
}
