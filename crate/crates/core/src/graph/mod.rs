//! Undirected graphs, tournaments and edge-colored multigraphs, plus the
//! text formats and seeded generators used by the CLI and the test suites.

mod colored;
mod generate;
mod io;

pub use colored::{ColoredEdge, ColoredGraphError, ColoredMultigraph, EdgeShape};
pub use generate::{generate_instance, Family, GenError, GeneratedInstance, GeneratorConfig};
pub use io::{
    parse_graph, parse_instance, parse_tournament, serialize_graph, serialize_instance, serialize_tournament,
    InstanceSpec, ParseError, Payload, Problem,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("vertex set is not acyclic: directed triangle {0:?}")]
    NotAcyclic([usize; 3]),
}

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    n: usize,
    adj: Vec<bool>,
    nbrs: Vec<Vec<usize>>,
}

impl UndirectedGraph {
    pub fn empty(n: usize) -> Self {
        Self { n, adj: vec![false; n * n], nbrs: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if g.has_edge(u, v) {
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
            g.insert(u, v);
        }
        for list in &mut g.nbrs {
            list.sort_unstable();
        }
        Ok(g)
    }

    fn insert(&mut self, u: usize, v: usize) {
        self.adj[u * self.n + v] = true;
        self.adj[v * self.n + u] = true;
        self.nbrs[u].push(v);
        self.nbrs[v].push(u);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    /// Sorted neighbor list.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.nbrs[v]
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for &v in &self.nbrs[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.nbrs.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Subgraph induced by `keep` (sorted, distinct); vertex `keep[i]` becomes `i`.
    pub fn induced(&self, keep: &[usize]) -> Self {
        let mut g = Self::empty(keep.len());
        for (i, &u) in keep.iter().enumerate() {
            for (j, &v) in keep.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.insert(i, j);
                }
            }
        }
        for list in &mut g.nbrs {
            list.sort_unstable();
        }
        g
    }

    /// Whether `{a, b, c}` induces a path on three vertices (in any order).
    #[inline]
    pub fn is_induced_p3(&self, a: usize, b: usize, c: usize) -> bool {
        let edges = self.has_edge(a, b) as u8 + self.has_edge(b, c) as u8 + self.has_edge(a, c) as u8;
        edges == 2
    }
}

/// Tournament stored as a full orientation matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tournament {
    n: usize,
    arcs: Vec<bool>,
}

impl Tournament {
    /// `forward(u, v)` is queried for `u < v` and decides whether the arc is `u -> v`.
    pub fn from_fn(n: usize, mut forward: impl FnMut(usize, usize) -> bool) -> Self {
        let mut arcs = vec![false; n * n];
        for u in 0..n {
            for v in u + 1..n {
                if forward(u, v) {
                    arcs[u * n + v] = true;
                } else {
                    arcs[v * n + u] = true;
                }
            }
        }
        Self { n, arcs }
    }

    /// Transitive tournament whose arcs follow `order` (earlier beats later).
    pub fn transitive(order: &[usize]) -> Self {
        let n = order.len();
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        Self::from_fn(n, |u, v| pos[u] < pos[v])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn arc(&self, u: usize, v: usize) -> bool {
        self.arcs[u * self.n + v]
    }

    /// Orients the pair `{u, v}` as `u -> v`.
    pub fn set_arc(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n);
        self.arcs[u * self.n + v] = true;
        self.arcs[v * self.n + u] = false;
    }

    pub fn induced(&self, keep: &[usize]) -> Self {
        Self::from_fn(keep.len(), |i, j| self.arc(keep[i], keep[j]))
    }

    #[inline]
    pub fn is_triangle(&self, a: usize, b: usize, c: usize) -> bool {
        (self.arc(a, b) && self.arc(b, c) && self.arc(c, a)) || (self.arc(a, c) && self.arc(c, b) && self.arc(b, a))
    }
}

fn sorted_scope(scope: &[usize]) -> Vec<usize> {
    let mut s = scope.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// All directed triangles inside `scope`, each as a sorted triple, in lexicographic order.
pub fn enumerate_triangles(t: &Tournament, scope: &[usize]) -> Vec<[usize; 3]> {
    let s = sorted_scope(scope);
    let mut out = Vec::new();
    for (i, &a) in s.iter().enumerate() {
        for (j, &b) in s.iter().enumerate().skip(i + 1) {
            for &c in &s[j + 1..] {
                if t.is_triangle(a, b, c) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

/// All induced P3s inside `scope`, each as a sorted triple, in lexicographic order.
pub fn enumerate_induced_p3(g: &UndirectedGraph, scope: &[usize]) -> Vec<[usize; 3]> {
    let s = sorted_scope(scope);
    let mut out = Vec::new();
    for (i, &a) in s.iter().enumerate() {
        for (j, &b) in s.iter().enumerate().skip(i + 1) {
            for &c in &s[j + 1..] {
                if g.is_induced_p3(a, b, c) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

/// Topological order of the acyclic sub-tournament `T[s]`.
pub fn topological_order(t: &Tournament, s: &[usize]) -> Result<Vec<usize>, GraphError> {
    let s = sorted_scope(s);
    let mut keyed: Vec<(usize, usize)> =
        s.iter().map(|&u| (s.iter().filter(|&&v| v != u && t.arc(u, v)).count(), u)).collect();
    keyed.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let order: Vec<usize> = keyed.into_iter().map(|(_, u)| u).collect();
    // A transitive tournament has pairwise distinct out-degrees, so sorting recovers the order.
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if !t.arc(order[i], order[j]) {
                let tri = enumerate_triangles(t, &s)[0];
                return Err(GraphError::NotAcyclic(tri));
            }
        }
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_triangles(t: &Tournament) -> Vec<[usize; 3]> {
        let n = t.n();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let cyc1 = t.arc(a, b) && t.arc(b, c) && t.arc(c, a);
                    let cyc2 = t.arc(b, a) && t.arc(c, b) && t.arc(a, c);
                    if cyc1 || cyc2 {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }

    fn brute_p3(g: &UndirectedGraph) -> Vec<[usize; 3]> {
        let n = g.n();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let e = [g.has_edge(a, b), g.has_edge(b, c), g.has_edge(a, c)];
                    if e.iter().filter(|&&x| x).count() == 2 {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }

    fn tournament_from_bits(n: usize, bits: &[bool]) -> Tournament {
        let mut it = bits.iter().cycle();
        Tournament::from_fn(n, |_, _| *it.next().unwrap())
    }

    #[test]
    fn topological_order_examples() {
        let t = Tournament::from_fn(1, |_, _| true);
        assert_eq!(topological_order(&t, &[0]).unwrap(), vec![0]);
        // a=0 -> b=1 -> c=2, a -> c
        let t = Tournament::from_fn(3, |_, _| true);
        assert_eq!(topological_order(&t, &[0, 1, 2]).unwrap(), vec![0, 1, 2]);
        let mut cyc = Tournament::from_fn(3, |_, _| true);
        cyc.set_arc(2, 0);
        assert_eq!(topological_order(&cyc, &[0, 1, 2]), Err(GraphError::NotAcyclic([0, 1, 2])));
    }

    #[test]
    fn triangle_and_p3_examples() {
        let acyclic = Tournament::transitive(&[3, 1, 0, 2]);
        assert!(enumerate_triangles(&acyclic, &[0, 1, 2, 3]).is_empty());
        let mut cyc = Tournament::from_fn(3, |_, _| true);
        cyc.set_arc(2, 0);
        assert_eq!(enumerate_triangles(&cyc, &[0, 1, 2]), vec![[0, 1, 2]]);

        let k3 = UndirectedGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(enumerate_induced_p3(&k3, &[0, 1, 2]).is_empty());
        let path = UndirectedGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(enumerate_induced_p3(&path, &[0, 1, 2]), vec![[0, 1, 2]]);
        let star = UndirectedGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(enumerate_induced_p3(&star, &[0, 1, 2, 3]), vec![[0, 1, 2], [0, 1, 3], [0, 2, 3]]);
    }

    #[test]
    fn random_six_vertex_tournaments_match_brute_force() {
        for mask in [0u32, 0b1010_1100_1110_0001, 0x5a5a, 0x7fff] {
            let bits: Vec<bool> = (0..15).map(|i| mask >> i & 1 == 1).collect();
            let t = tournament_from_bits(6, &bits);
            let all: Vec<usize> = (0..6).collect();
            assert_eq!(enumerate_triangles(&t, &all), brute_triangles(&t));
        }
    }

    #[test]
    fn graph_rejects_bad_edges() {
        assert_eq!(UndirectedGraph::from_edges(2, &[(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(UndirectedGraph::from_edges(2, &[(0, 1), (1, 0)]), Err(GraphError::DuplicateEdge(0, 1)));
        assert!(matches!(
            UndirectedGraph::from_edges(2, &[(0, 2)]),
            Err(GraphError::VertexOutOfRange { vertex: 2, n: 2 })
        ));
    }

    proptest! {
        #[test]
        fn triangles_agree_with_naive(n in 0usize..=12, bits in prop::collection::vec(any::<bool>(), 66)) {
            let t = tournament_from_bits(n, &bits);
            let all: Vec<usize> = (0..n).collect();
            prop_assert_eq!(enumerate_triangles(&t, &all), brute_triangles(&t));
        }

        #[test]
        fn p3_agree_with_naive(n in 0usize..=12, bits in prop::collection::vec(any::<bool>(), 66)) {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n { for v in u + 1..n { if bits[k] { edges.push((u, v)); } k += 1; } }
            let g = UndirectedGraph::from_edges(n, &edges).unwrap();
            let all: Vec<usize> = (0..n).collect();
            prop_assert_eq!(enumerate_induced_p3(&g, &all), brute_p3(&g));
        }

        #[test]
        fn topological_order_respects_arcs(perm in Just((0..10usize).collect::<Vec<_>>()).prop_shuffle(),
                                           keep in prop::collection::vec(any::<bool>(), 10)) {
            let t = Tournament::transitive(&perm);
            let s: Vec<usize> = (0..10).filter(|&v| keep[v]).collect();
            let o = topological_order(&t, &s).unwrap();
            prop_assert_eq!(o.len(), s.len());
            for i in 0..o.len() {
                for j in i + 1..o.len() {
                    prop_assert!(t.arc(o[i], o[j]));
                }
            }
        }
    }
}
