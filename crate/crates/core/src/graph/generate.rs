use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{InstanceSpec, Payload, Problem, Tournament, UndirectedGraph};

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// Every pair oriented by a fair coin.
    UniformTournament { n: usize },
    /// G(n, p).
    ErdosRenyi { n: usize, p: f64 },
    /// `planted` disjoint directed triangles plus `filler` extra vertices; all other arcs
    /// follow one random linear order, then each of them is reversed with probability `noise`.
    PlantedTriangles { planted: usize, filler: usize, noise: f64 },
    /// `planted` disjoint induced P3s plus `filler` vertices split into random cliques;
    /// afterwards every pair outside the planted paths is toggled with probability `noise`.
    PlantedP3 { planted: usize, filler: usize, noise: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub family: Family,
    pub problem: Problem,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedInstance {
    pub instance: InstanceSpec,
    /// Vertex triples of the planted triangles or P3s, if any.
    pub planted: Vec<[usize; 3]>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
}

fn check_prob(name: &str, p: f64) -> Result<(), GenError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(GenError::InvalidConfig(format!("{name} = {p} is not a probability")))
    }
}

/// Deterministic for a fixed `(config, seed)`.
pub fn generate_instance(cfg: &GeneratorConfig, seed: u64) -> Result<GeneratedInstance, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (payload, planted) = match cfg.family {
        Family::UniformTournament { n } => {
            (Payload::Tournament(Tournament::from_fn(n, |_, _| rng.gen_bool(0.5))), Vec::new())
        }
        Family::ErdosRenyi { n, p } => {
            check_prob("p", p)?;
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            (Payload::Graph(UndirectedGraph::from_edges(n, &edges).expect("valid edges")), Vec::new())
        }
        Family::PlantedTriangles { planted, filler, noise } => {
            check_prob("noise", noise)?;
            let (t, w) = planted_triangles(planted, filler, noise, &mut rng);
            (Payload::Tournament(t), w)
        }
        Family::PlantedP3 { planted, filler, noise } => {
            check_prob("noise", noise)?;
            let (g, w) = planted_p3(planted, filler, noise, &mut rng);
            (Payload::Graph(g), w)
        }
    };
    let instance = InstanceSpec::new(cfg.problem, cfg.k, payload).map_err(GenError::InvalidConfig)?;
    Ok(GeneratedInstance { instance, planted })
}

fn relabel(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

fn sorted3(mut t: [usize; 3]) -> [usize; 3] {
    t.sort_unstable();
    t
}

fn planted_triangles(k: usize, filler: usize, noise: f64, rng: &mut ChaCha8Rng) -> (Tournament, Vec<[usize; 3]>) {
    let n = 3 * k + filler;
    let id = relabel(rng, n);
    // Position in a random global order; planted triples are then turned into cycles.
    let pos = relabel(rng, n);
    let group = |x: usize| if x < 3 * k { Some(x / 3) } else { None };
    let mut arcs = vec![vec![false; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let forward = match (group(a), group(b)) {
                (Some(ga), Some(gb)) if ga == gb => {
                    // a < b within a triple: 3g -> 3g+1 -> 3g+2 -> 3g
                    !(a % 3 == 0 && b % 3 == 2)
                }
                _ => {
                    let f = pos[a] < pos[b];
                    if rng.gen_bool(noise) {
                        !f
                    } else {
                        f
                    }
                }
            };
            arcs[id[a]][id[b]] = forward;
            arcs[id[b]][id[a]] = !forward;
        }
    }
    let t = Tournament::from_fn(n, |u, v| arcs[u][v]);
    let witness = (0..k).map(|g| sorted3([id[3 * g], id[3 * g + 1], id[3 * g + 2]])).collect();
    (t, witness)
}

fn planted_p3(k: usize, filler: usize, noise: f64, rng: &mut ChaCha8Rng) -> (UndirectedGraph, Vec<[usize; 3]>) {
    let n = 3 * k + filler;
    let id = relabel(rng, n);
    let mut adj = vec![vec![false; n]; n];
    for g in 0..k {
        let (a, b, c) = (3 * g, 3 * g + 1, 3 * g + 2);
        adj[a][b] = true;
        adj[b][c] = true;
    }
    // Filler cliques of random sizes in 1..=4.
    let mut start = 3 * k;
    while start < n {
        let size = rng.gen_range(1..=4).min(n - start);
        for a in start..start + size {
            for b in a + 1..start + size {
                adj[a][b] = true;
            }
        }
        start += size;
    }
    for a in 0..n {
        for b in a + 1..n {
            let same_planted = a < 3 * k && b < 3 * k && a / 3 == b / 3;
            if !same_planted && rng.gen_bool(noise) {
                adj[a][b] = !adj[a][b];
            }
        }
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if adj[a][b] {
                edges.push((id[a], id[b]));
            }
        }
    }
    let g = UndirectedGraph::from_edges(n, &edges).expect("valid edges");
    let witness = (0..k).map(|g| sorted3([id[3 * g], id[3 * g + 1], id[3 * g + 2]])).collect();
    (g, witness)
}
