//! Exponential ground-truth solvers for small instances.
//!
//! Whether three vertices form a triangle (or an induced P3) depends only on the
//! arcs (edges) among them, so both problem pairs reduce to packing or hitting
//! the fixed family of obstruction triples. Triples are kept as `u64` masks,
//! hence the hard cap of 64 vertices.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{
    enumerate_induced_p3, enumerate_triangles, InstanceSpec, Payload, Problem, Tournament, UndirectedGraph,
};

pub const DEFAULT_TOURNAMENT_LIMIT: usize = 24;
pub const DEFAULT_GRAPH_LIMIT: usize = 30;
const MASK_BITS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("instance has {n} vertices, above the exact-solver limit {limit}")]
    TooLarge { n: usize, limit: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Witness {
    Packing(Vec<[usize; 3]>),
    VertexSet(Vec<usize>),
}

impl Witness {
    /// Number of packed triples or chosen vertices.
    pub fn len(&self) -> usize {
        match self {
            Witness::Packing(p) => p.len(),
            Witness::VertexSet(x) => x.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactAnswer {
    pub problem: Problem,
    /// Maximum packing size or minimum hitting-set size.
    pub value: usize,
    pub witness: Witness,
}

impl ExactAnswer {
    /// Whether `(instance, k)` is a yes-instance.
    pub fn decides(&self, k: usize) -> bool {
        if self.problem.is_packing() {
            self.value >= k
        } else {
            self.value <= k
        }
    }
}

fn check(n: usize, limit: usize) -> Result<(), ExactError> {
    let limit = limit.min(MASK_BITS);
    if n > limit {
        Err(ExactError::TooLarge { n, limit })
    } else {
        Ok(())
    }
}

fn masks(triples: &[[usize; 3]]) -> Vec<u64> {
    triples.iter().map(|t| t.iter().fold(0u64, |m, &v| m | 1 << v)).collect()
}

fn unmask(m: u64) -> [usize; 3] {
    let mut out = [0; 3];
    let mut bits = m;
    for slot in &mut out {
        *slot = bits.trailing_zeros() as usize;
        bits &= bits - 1;
    }
    out
}

struct Packer<'a> {
    triples: &'a [u64],
    target: usize,
    best: Vec<u64>,
    current: Vec<u64>,
}

impl Packer<'_> {
    fn rec(&mut self, avail: u64, alive: &[u64]) {
        if self.best.len() >= self.target {
            return;
        }
        if self.current.len() > self.best.len() {
            self.best = self.current.clone();
            if self.best.len() >= self.target {
                return;
            }
        }
        let span = alive.iter().fold(0u64, |m, &t| m | t);
        if span == 0 || self.current.len() + (span.count_ones() as usize) / 3 <= self.best.len() {
            return;
        }
        let v = span.trailing_zeros();
        for &t in alive.iter().filter(|&&t| t >> v & 1 == 1) {
            let rest = avail & !t;
            let next: Vec<u64> = alive.iter().copied().filter(|&u| u & !rest == 0).collect();
            self.current.push(t);
            self.rec(rest, &next);
            self.current.pop();
        }
        let rest = avail & !(1u64 << v);
        let next: Vec<u64> = alive.iter().copied().filter(|&u| u & !rest == 0).collect();
        self.rec(rest, &next);
    }
}

/// Branch and bound; stops early once `target` triples are packed.
fn pack(n: usize, triples: &[[usize; 3]], target: usize) -> Vec<[usize; 3]> {
    let ms = masks(triples);
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut p = Packer { triples: &ms, target, best: Vec::new(), current: Vec::new() };
    // Greedy lower bound first.
    let mut used = 0u64;
    for &t in p.triples {
        if t & used == 0 {
            used |= t;
            p.best.push(t);
        }
    }
    p.rec(all, &ms);
    let mut out: Vec<[usize; 3]> = p.best.into_iter().map(unmask).collect();
    out.truncate(target);
    out.sort_unstable();
    out
}

fn greedy_disjoint(triples: &[u64], removed: u64) -> usize {
    let mut used = removed;
    let mut count = 0;
    for &t in triples {
        if t & used == 0 {
            used |= t;
            count += 1;
        }
    }
    count
}

fn hit_rec(triples: &[u64], removed: u64, budget: usize, chosen: &mut Vec<usize>) -> bool {
    let Some(&t) = triples.iter().find(|&&t| t & removed == 0) else { return true };
    if budget == 0 || greedy_disjoint(triples, removed) > budget {
        return false;
    }
    for v in unmask(t) {
        chosen.push(v);
        if hit_rec(triples, removed | 1 << v, budget - 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Minimum hitting set of size at most `max`, by iterative deepening.
fn hit(triples: &[[usize; 3]], max: usize) -> Option<Vec<usize>> {
    let ms = masks(triples);
    (0..=max).find_map(|b| {
        let mut chosen = Vec::new();
        hit_rec(&ms, 0, b, &mut chosen).then(|| {
            chosen.sort_unstable();
            chosen
        })
    })
}

fn all(n: usize) -> Vec<usize> {
    (0..n).collect()
}

pub fn max_triangle_packing(t: &Tournament, limit: usize) -> Result<ExactAnswer, ExactError> {
    check(t.n(), limit)?;
    let p = pack(t.n(), &enumerate_triangles(t, &all(t.n())), usize::MAX);
    Ok(ExactAnswer { problem: Problem::Tpt, value: p.len(), witness: Witness::Packing(p) })
}

pub fn min_fvs_tournament(t: &Tournament, limit: usize) -> Result<ExactAnswer, ExactError> {
    check(t.n(), limit)?;
    let x = hit(&enumerate_triangles(t, &all(t.n())), t.n()).expect("all vertices hit everything");
    Ok(ExactAnswer { problem: Problem::Fvst, value: x.len(), witness: Witness::VertexSet(x) })
}

pub fn max_induced_p3_packing(g: &UndirectedGraph, limit: usize) -> Result<ExactAnswer, ExactError> {
    check(g.n(), limit)?;
    let p = pack(g.n(), &enumerate_induced_p3(g, &all(g.n())), usize::MAX);
    Ok(ExactAnswer { problem: Problem::I2pp, value: p.len(), witness: Witness::Packing(p) })
}

pub fn min_p3_hitting_set(g: &UndirectedGraph, limit: usize) -> Result<ExactAnswer, ExactError> {
    check(g.n(), limit)?;
    let x = hit(&enumerate_induced_p3(g, &all(g.n())), g.n()).expect("all vertices hit everything");
    Ok(ExactAnswer { problem: Problem::I2phs, value: x.len(), witness: Witness::VertexSet(x) })
}

/// Decides `(instance, k)` without computing the full optimum; returns the answer and a
/// witness for yes-instances (a packing of size `k` or a hitting set of size at most `k`).
pub fn decide(inst: &InstanceSpec, limit: usize) -> Result<(bool, Option<Witness>), ExactError> {
    check(inst.n(), limit)?;
    let k = inst.k;
    let triples = match &inst.payload {
        Payload::Tournament(t) => enumerate_triangles(t, &all(t.n())),
        Payload::Graph(g) => enumerate_induced_p3(g, &all(g.n())),
    };
    if inst.problem.is_packing() {
        let p = pack(inst.n(), &triples, k);
        Ok(if p.len() >= k { (true, Some(Witness::Packing(p))) } else { (false, None) })
    } else {
        Ok(match hit(&triples, k) {
            Some(x) => (true, Some(Witness::VertexSet(x))),
            None => (false, None),
        })
    }
}

/// Exact optimum for the instance's problem.
pub fn solve(inst: &InstanceSpec, limit: usize) -> Result<ExactAnswer, ExactError> {
    match (&inst.payload, inst.problem) {
        (Payload::Tournament(t), Problem::Tpt) => max_triangle_packing(t, limit),
        (Payload::Tournament(t), _) => min_fvs_tournament(t, limit),
        (Payload::Graph(g), Problem::I2pp) => max_induced_p3_packing(g, limit),
        (Payload::Graph(g), _) => min_p3_hitting_set(g, limit),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_instance, Family, GeneratorConfig};
    use proptest::prelude::*;

    fn brute_pack(n: usize, triples: &[[usize; 3]]) -> usize {
        fn rec(i: usize, used: u64, ms: &[u64]) -> usize {
            if i == ms.len() {
                return 0;
            }
            let skip = rec(i + 1, used, ms);
            if ms[i] & used == 0 {
                skip.max(1 + rec(i + 1, used | ms[i], ms))
            } else {
                skip
            }
        }
        let _ = n;
        rec(0, 0, &masks(triples))
    }

    fn brute_hit(n: usize, triples: &[[usize; 3]]) -> usize {
        let ms = masks(triples);
        (0u64..1 << n).filter(|&x| ms.iter().all(|&t| t & x != 0)).map(|x| x.count_ones() as usize).min().unwrap()
    }

    fn graph_from_bits(n: usize, bits: &[bool]) -> UndirectedGraph {
        let mut edges = Vec::new();
        let mut i = 0;
        for u in 0..n {
            for v in u + 1..n {
                if bits[i] {
                    edges.push((u, v));
                }
                i += 1;
            }
        }
        UndirectedGraph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn small_examples() {
        let acyclic = Tournament::transitive(&[2, 0, 1, 3]);
        assert_eq!(max_triangle_packing(&acyclic, 24).unwrap().value, 0);
        assert_eq!(min_fvs_tournament(&acyclic, 24).unwrap().value, 0);
        let mut cyc = Tournament::from_fn(3, |_, _| true);
        cyc.set_arc(2, 0);
        assert_eq!(max_triangle_packing(&cyc, 24).unwrap().value, 1);
        assert_eq!(min_fvs_tournament(&cyc, 24).unwrap().value, 1);

        let k4 = graph_from_bits(4, &[true; 6]);
        assert_eq!(max_induced_p3_packing(&k4, 30).unwrap().value, 0);
        assert_eq!(min_p3_hitting_set(&k4, 30).unwrap().value, 0);
        let p3 = UndirectedGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(max_induced_p3_packing(&p3, 30).unwrap().value, 1);
        assert_eq!(min_p3_hitting_set(&p3, 30).unwrap().value, 1);
        let p6 = UndirectedGraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        assert_eq!(max_induced_p3_packing(&p6, 30).unwrap().value, 2);
        let star = UndirectedGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let h = min_p3_hitting_set(&star, 30).unwrap();
        assert_eq!((h.value, h.witness), (1, Witness::VertexSet(vec![0])));

        assert_eq!(
            max_triangle_packing(&Tournament::transitive(&(0..25).collect::<Vec<_>>()), 24),
            Err(ExactError::TooLarge { n: 25, limit: 24 })
        );
    }

    #[test]
    fn planted_instances() {
        let cfg = GeneratorConfig {
            family: Family::PlantedTriangles { planted: 2, filler: 0, noise: 0.0 },
            problem: Problem::Tpt,
            k: 2,
        };
        let gen = generate_instance(&cfg, 1).unwrap();
        let Payload::Tournament(t) = &gen.instance.payload else { unreachable!() };
        assert_eq!(t.n(), 6);
        assert!(max_triangle_packing(t, 24).unwrap().value >= 2);

        let cfg = GeneratorConfig {
            family: Family::PlantedTriangles { planted: 2, filler: 6, noise: 0.0 },
            problem: Problem::Tpt,
            k: 2,
        };
        let gen = generate_instance(&cfg, 5).unwrap();
        let Payload::Tournament(t) = &gen.instance.payload else { unreachable!() };
        let best = max_triangle_packing(t, 24).unwrap().value;
        assert!(best >= 2);
        assert_eq!(best, brute_pack(12, &enumerate_triangles(t, &all(12))));
    }

    #[test]
    fn fvs_is_minimum_by_subset_enumeration() {
        for seed in 0..10 {
            let cfg = GeneratorConfig { family: Family::UniformTournament { n: 9 }, problem: Problem::Fvst, k: 0 };
            let Payload::Tournament(t) = generate_instance(&cfg, seed).unwrap().instance.payload else {
                unreachable!()
            };
            let ans = min_fvs_tournament(&t, 24).unwrap();
            let Witness::VertexSet(x) = &ans.witness else { unreachable!() };
            let rest: Vec<usize> = (0..9).filter(|v| !x.contains(v)).collect();
            assert!(enumerate_triangles(&t, &rest).is_empty());
            assert_eq!(ans.value, brute_hit(9, &enumerate_triangles(&t, &all(9))));
        }
    }

    proptest! {
        #[test]
        fn graph_solvers_match_brute_force(n in 0usize..=10, bits in prop::collection::vec(any::<bool>(), 45)) {
            let g = graph_from_bits(n, &bits);
            let triples = enumerate_induced_p3(&g, &all(n));
            let pk = max_induced_p3_packing(&g, 30).unwrap();
            let ht = min_p3_hitting_set(&g, 30).unwrap();
            prop_assert_eq!(pk.value, brute_pack(n, &triples));
            prop_assert_eq!(ht.value, brute_hit(n, &triples));
            prop_assert!(ht.value >= pk.value);
            if let Witness::Packing(p) = &pk.witness {
                let mut seen = 0u64;
                for t in p {
                    prop_assert!(g.is_induced_p3(t[0], t[1], t[2]));
                    let m = masks(&[*t])[0];
                    prop_assert_eq!(seen & m, 0);
                    seen |= m;
                }
            }
            for k in 0..4 {
                for problem in [Problem::I2pp, Problem::I2phs] {
                    let inst = InstanceSpec::new(problem, k, Payload::Graph(g.clone())).unwrap();
                    let want = if problem.is_packing() { pk.value >= k } else { ht.value <= k };
                    prop_assert_eq!(decide(&inst, 30).unwrap().0, want);
                }
            }
        }

        #[test]
        fn tournament_solvers_match_brute_force(n in 0usize..=10, bits in prop::collection::vec(any::<bool>(), 45)) {
            let mut it = bits.iter();
            let t = Tournament::from_fn(n, |_, _| *it.next().unwrap());
            let triples = enumerate_triangles(&t, &all(n));
            let pk = max_triangle_packing(&t, 24).unwrap();
            let ht = min_fvs_tournament(&t, 24).unwrap();
            prop_assert_eq!(pk.value, brute_pack(n, &triples));
            prop_assert_eq!(ht.value, brute_hit(n, &triples));
            prop_assert!(ht.value >= pk.value);
        }
    }
}
