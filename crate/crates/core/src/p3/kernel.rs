//! The round loop, the kept-set report, and the two solution translations
//! (packings of the input into the kernel, hitting sets of the kernel back to the input).

use crate::graph::Problem;
use crate::graph::{enumerate_induced_p3, UndirectedGraph};
use crate::rainbow::OracleConfig;
use crate::report::{KernelReport, RoundCase, RoundRecord};

use super::{
    apply_rule_p3, clean_p3, greedy_localize_p3, validate_p3, P3Buckets, P3Error, P3Localization, P3LocalizedPair,
    P3PartialDecomp, P3RuleOutcome, Role,
};

/// Decomposition and matching at the moment the rule stopped; needed to translate solutions.
#[derive(Clone, Debug, PartialEq)]
pub struct P3FinalState {
    pub loc: P3LocalizedPair,
    pub decomp: P3PartialDecomp,
    pub buckets: P3Buckets,
    pub mates: Vec<(usize, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct P3KernelResult {
    pub report: KernelReport,
    /// `None` when the greedy packing settled the instance.
    pub final_state: Option<P3FinalState>,
}

impl P3KernelResult {
    pub fn kept(&self) -> &[usize] {
        &self.report.kept
    }

    pub fn settled(&self) -> Option<bool> {
        self.report.settled
    }
}

/// `3(1+2c1)^2 k` with `c1 = 4 + eps`.
pub fn p3_bound(eps: f64, k: usize) -> f64 {
    let c1 = 4.0 + eps;
    3.0 * (1.0 + 2.0 * c1).powi(2) * k as f64
}

fn potential(d: &P3PartialDecomp, bk: &P3Buckets) -> usize {
    bk.f_bar().len() + d.role.iter().filter(|&&r| r == Role::C).count()
}

fn count(d: &P3PartialDecomp, r: Role) -> usize {
    d.role.iter().filter(|&&x| x == r).count()
}

/// Kernelizes `(g, k)` for induced-P3 packing or hitting set.
///
/// The greedy packing settles packing instances once it finds `k` paths and hitting-set
/// instances once it finds `k + 1`; the kept set is then the vertices of those paths.
pub fn kernelize_p3(
    g: &UndirectedGraph,
    k: usize,
    eps: f64,
    problem: Problem,
    cfg: &OracleConfig,
) -> Result<P3KernelResult, P3Error> {
    kernelize_p3_observed(g, k, eps, problem, cfg, &mut |_, _| {})
}

/// As [`kernelize_p3`], handing every decomposition the loop accepts (each rule output and
/// each cleaned state, starting with the initial one) to `observe`.
pub fn kernelize_p3_observed(
    g: &UndirectedGraph,
    k: usize,
    eps: f64,
    problem: Problem,
    cfg: &OracleConfig,
    observe: &mut dyn FnMut(&P3LocalizedPair, &P3PartialDecomp),
) -> Result<P3KernelResult, P3Error> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(P3Error::Precondition(format!("epsilon must be positive, got {eps}")));
    }
    if !matches!(problem, Problem::I2pp | Problem::I2phs) {
        return Err(P3Error::Precondition(format!("{problem} is not a P3 problem")));
    }
    let packing_problem = problem.is_packing();
    let threshold = if packing_problem { k } else { k + 1 };
    let c1 = 4.0 + eps;
    let bound_value = p3_bound(eps, k);
    let mut report = KernelReport {
        problem: problem.as_str().to_string(),
        n: g.n(),
        k,
        epsilon: Some(eps),
        epsilon_prime: Some(12.0 * eps * eps + 108.0 * eps),
        delta: None,
        c_delta: None,
        greedy_packing: 0,
        c0: 0,
        w0: 0,
        settled: None,
        rounds: Vec::new(),
        kept_size: 0,
        kept: Vec::new(),
        bound_formula: format!("3*(1+2*c1)^2*k with c1 = 4+epsilon = {c1}, k = {k}"),
        bound_value,
        within_bound: false,
        tight_bound_value: None,
    };

    let loc = match greedy_localize_p3(g, threshold) {
        P3Localization::Reached(paths) => {
            let mut kept: Vec<usize> = paths.iter().flatten().copied().collect();
            kept.sort_unstable();
            report.greedy_packing = paths.len();
            report.c0 = kept.len();
            report.w0 = g.n() - kept.len();
            report.settled = Some(packing_problem);
            finish(&mut report, kept);
            return Ok(P3KernelResult { report, final_state: None });
        }
        P3Localization::Pair(loc) => loc,
    };
    report.greedy_packing = loc.packing.len();
    report.c0 = loc.c0.len();
    report.w0 = g.n() - loc.c0.len();
    report.tight_bound_value = Some((1.0 + 2.0 * c1).powi(2) * loc.c0.len() as f64);

    let initial = P3PartialDecomp::initial(&loc, g.n(), eps);
    let (mut d, moved) = clean_p3(g, &loc, &initial);
    let mut bk = validate_p3(g, &loc, &d).map_err(|details| P3Error::InvariantViolation { round: 0, details })?;
    observe(&loc, &d);
    let start_potential = potential(&d, &bk);
    report.rounds.push(RoundRecord {
        round: 0,
        case: RoundCase::Clean,
        w: count(&initial, Role::W),
        b: count(&initial, Role::B),
        c: count(&initial, Role::C),
        f_bar: Some(loc.cliques.len()),
        potential: loc.cliques.len() + loc.c0.len(),
        cleaned: moved.len(),
        oracle: None,
        demand: None,
        invariants_ok: true,
    });

    for round in 1.. {
        let pot = potential(&d, &bk);
        if round > start_potential + 1 {
            return Err(P3Error::InvariantViolation {
                round,
                details: vec![format!("round count exceeds the initial potential {start_potential}")],
            });
        }
        let mut record = RoundRecord {
            round,
            case: RoundCase::Matching,
            w: count(&d, Role::W),
            b: count(&d, Role::B),
            c: count(&d, Role::C),
            f_bar: Some(bk.f_bar().len()),
            potential: pot,
            cleaned: 0,
            oracle: None,
            demand: None,
            invariants_ok: true,
        };
        let (outcome, stats) = apply_rule_p3(g, &loc, &d, &bk, cfg)?;
        record.oracle = Some(stats);
        match outcome {
            P3RuleOutcome::Stop { kept, mates } => {
                report.rounds.push(record);
                finish(&mut report, kept);
                let final_state = P3FinalState { loc, decomp: d, buckets: bk, mates };
                return Ok(P3KernelResult { report, final_state: Some(final_state) });
            }
            P3RuleOutcome::Next { decomp, case } => {
                record.case = case;
                let violation = |details| P3Error::InvariantViolation { round, details };
                validate_p3(g, &loc, &decomp).map_err(violation)?;
                observe(&loc, &decomp);
                let (cleaned, moved) = clean_p3(g, &loc, &decomp);
                let next_bk = validate_p3(g, &loc, &cleaned).map_err(violation)?;
                observe(&loc, &cleaned);
                let next_pot = potential(&cleaned, &next_bk);
                if next_pot >= pot {
                    return Err(violation(vec![format!("potential did not decrease: {pot} -> {next_pot}")]));
                }
                record.cleaned = moved.len();
                report.rounds.push(record);
                d = cleaned;
                bk = next_bk;
            }
        }
    }
    unreachable!("the loop returns")
}

fn finish(report: &mut KernelReport, kept: Vec<usize>) {
    report.kept_size = kept.len();
    report.within_bound = kept.len() as f64 <= report.bound_value + 1e-9;
    report.kept = kept;
}

fn hits_all(g: &UndirectedGraph, scope: &[usize], in_x: &[bool]) -> Option<[usize; 3]> {
    enumerate_induced_p3(g, scope).into_iter().find(|t| t.iter().all(|&v| !in_x[v]))
}

/// Turns a hitting set of the kernel `G[A]` into a hitting set of `g` that is no larger.
pub fn lift_hitting_set_p3(g: &UndirectedGraph, result: &P3KernelResult, x: &[usize]) -> Result<Vec<usize>, P3Error> {
    let Some(state) = &result.final_state else {
        return Err(P3Error::Precondition(
            "the instance was settled by localization; there is no kernel state to lift through".into(),
        ));
    };
    let kept = result.kept();
    let mut in_kept = vec![false; g.n()];
    for &v in kept {
        in_kept[v] = true;
    }
    let mut in_x = vec![false; g.n()];
    for &v in x {
        if v >= g.n() || !in_kept[v] {
            return Err(P3Error::InvalidSolution(format!("vertex {v} is not in the kernel")));
        }
        in_x[v] = true;
    }
    if let Some(t) = hits_all(g, kept, &in_x) {
        return Err(P3Error::InvalidSolution(format!("induced P3 {t:?} of the kernel is not hit")));
    }
    for v in 0..g.n() {
        if in_x[v] {
            in_x[v] = false;
            if hits_all(g, kept, &in_x).is_some() {
                in_x[v] = true;
            }
        }
    }
    let d = &state.decomp;
    let mut out = vec![false; g.n()];
    for v in 0..g.n() {
        out[v] = d.role[v] == Role::C || (d.role[v] == Role::B && in_x[v]);
    }
    // Buckets whose whole loop-matched part of W was deleted are deleted as well.
    for (i, bucket) in state.buckets.buckets.iter().enumerate() {
        if bucket.is_empty() {
            continue;
        }
        let loop_vertices =
            state.mates.iter().filter(|(u, _)| bucket.contains(u)).flat_map(|(_, ends)| ends.iter().copied());
        if loop_vertices.clone().all(|w| in_x[w]) {
            debug_assert!(loop_vertices.clone().all(|w| state.buckets.w_parts[i].contains(&w)));
            for &u in bucket {
                out[u] = true;
            }
        }
    }
    Ok((0..g.n()).filter(|&v| out[v]).collect())
}

/// Reroutes a packing of `g` into an equally large packing of the kernel `G[A]`.
pub fn restructure_packing_p3(
    g: &UndirectedGraph,
    result: &P3KernelResult,
    packing: &[[usize; 3]],
) -> Result<Vec<[usize; 3]>, P3Error> {
    let Some(state) = &result.final_state else {
        return Err(P3Error::Precondition("the instance was settled by localization".into()));
    };
    let d = &state.decomp;
    let mate_of = |u: usize| -> &[usize] {
        state.mates.iter().find(|(c, _)| *c == u).map(|(_, e)| e.as_slice()).expect("every color is matched")
    };
    let mut used = vec![false; g.n()];
    for t in packing {
        if !g.is_induced_p3(t[0], t[1], t[2]) || t.iter().any(|&v| std::mem::replace(&mut used[v], true)) {
            return Err(P3Error::InvalidSolution(format!("{t:?} breaks the packing")));
        }
    }
    let mut out = Vec::with_capacity(packing.len());
    for t in packing {
        let path = if let Some(&u) = t.iter().filter(|&&v| d.role[v] == Role::C).min() {
            let ends = mate_of(u);
            [u, ends[0], ends[1]]
        } else if let Some(&w) = t.iter().find(|&&v| d.role[v] == Role::W) {
            let l = state.loc.clique_of(w).expect("W lies in a clique");
            let v = *t
                .iter()
                .filter(|&&v| state.buckets.buckets[l].contains(&v))
                .min()
                .expect("a path through one W vertex uses its bucket");
            let m = mate_of(v)[0];
            t.map(|x| if x == w { m } else { x })
        } else {
            *t
        };
        let mut path = path;
        path.sort_unstable();
        out.push(path);
    }
    let mut in_kept = vec![false; g.n()];
    for &v in result.kept() {
        in_kept[v] = true;
    }
    let mut seen = vec![false; g.n()];
    for t in &out {
        let ok = g.is_induced_p3(t[0], t[1], t[2])
            && t.iter().all(|&v| in_kept[v] && !std::mem::replace(&mut seen[v], true));
        if !ok {
            return Err(P3Error::InvalidSolution(format!("restructured path {t:?} is not valid in the kernel")));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{max_induced_p3_packing, min_p3_hitting_set, Witness};
    use crate::graph::Payload;
    use crate::graph::{generate_instance, Family, GeneratorConfig};
    use proptest::prelude::*;

    fn run(g: &UndirectedGraph, k: usize, problem: Problem) -> P3KernelResult {
        kernelize_p3(g, k, 1.0, problem, &OracleConfig::default()).unwrap()
    }

    fn graph_of(family: Family, seed: u64) -> UndirectedGraph {
        let cfg = GeneratorConfig { family, problem: Problem::I2pp, k: 1 };
        match generate_instance(&cfg, seed).unwrap().instance.payload {
            Payload::Graph(g) => g,
            Payload::Tournament(_) => unreachable!(),
        }
    }

    fn arb_graph() -> impl Strategy<Value = UndirectedGraph> {
        (3usize..=14, 0.1f64..0.7, any::<u64>()).prop_map(|(n, p, seed)| graph_of(Family::ErdosRenyi { n, p }, seed))
    }

    #[test]
    fn settles_when_the_greedy_packing_is_large() {
        let path = UndirectedGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let r = run(&path, 1, Problem::I2pp);
        assert_eq!((r.settled(), r.kept()), (Some(true), &[0, 1, 2][..]));
        let r = run(&path, 0, Problem::I2phs);
        assert_eq!(r.settled(), Some(false));
        let r = run(&path, 1, Problem::I2phs);
        assert_eq!(r.settled(), None);
        assert!(lift_hitting_set_p3(&path, &run(&path, 1, Problem::I2pp), &[1]).is_err());
    }

    #[test]
    fn epsilon_one_gives_363k() {
        assert_eq!(p3_bound(1.0, 1), 363.0);
        assert_eq!(p3_bound(1.0, 4), 1452.0);
    }

    #[test]
    fn kernel_preserves_planted_packing() {
        let g = graph_of(Family::PlantedP3 { planted: 3, filler: 31, noise: 0.05 }, 7);
        assert_eq!(g.n(), 40);
        let r = run(&g, 3, Problem::I2pp);
        assert!(r.report.within_bound && r.report.all_invariants_ok());
        if r.settled().is_none() {
            let sub = g.induced(r.kept());
            assert!(max_induced_p3_packing(&sub, 40).unwrap().value >= 3);
        }
    }

    #[test]
    fn lift_rejects_non_hitting_sets() {
        let g = graph_of(Family::ErdosRenyi { n: 9, p: 0.3 }, 3);
        let r = run(&g, 9, Problem::I2phs);
        let kept = r.kept().to_vec();
        if !enumerate_induced_p3(&g, &kept).is_empty() {
            assert!(matches!(lift_hitting_set_p3(&g, &r, &[]), Err(P3Error::InvalidSolution(_))));
        }
        let outside = (0..g.n()).find(|v| !kept.contains(v));
        if let Some(v) = outside {
            assert!(lift_hitting_set_p3(&g, &r, &[v]).is_err());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(120))]

        #[test]
        fn kernel_is_equivalent_and_small(g in arb_graph(), k in 1usize..=4) {
            for problem in [Problem::I2pp, Problem::I2phs] {
                let r = run(&g, k, problem);
                prop_assert!(r.report.within_bound);
                prop_assert!(r.report.all_invariants_ok() && r.report.potential_strictly_decreases());
                let sub = g.induced(r.kept());
                let (whole, kernel) = if problem.is_packing() {
                    (max_induced_p3_packing(&g, 30).unwrap().value >= k, max_induced_p3_packing(&sub, 30).unwrap().value >= k)
                } else {
                    (min_p3_hitting_set(&g, 30).unwrap().value <= k, min_p3_hitting_set(&sub, 30).unwrap().value <= k)
                };
                prop_assert_eq!(whole, kernel);
            }
        }

        #[test]
        fn solutions_translate(g in arb_graph(), k in 1usize..=4) {
            let r = run(&g, k, Problem::I2phs);
            prop_assume!(r.final_state.is_some());
            let kept = r.kept().to_vec();
            let sub = g.induced(&kept);
            let Witness::VertexSet(local) = min_p3_hitting_set(&sub, 30).unwrap().witness else { unreachable!() };
            let x: Vec<usize> = local.iter().map(|&i| kept[i]).collect();
            let lifted = lift_hitting_set_p3(&g, &r, &x).unwrap();
            prop_assert!(lifted.len() <= x.len());
            let mut in_x = vec![false; g.n()];
            for &v in &lifted { in_x[v] = true; }
            let all: Vec<usize> = (0..g.n()).collect();
            prop_assert!(hits_all(&g, &all, &in_x).is_none());

            let Witness::Packing(p) = max_induced_p3_packing(&g, 30).unwrap().witness else { unreachable!() };
            let moved = restructure_packing_p3(&g, &r, &p).unwrap();
            prop_assert_eq!(moved.len(), p.len());
        }
    }
}
