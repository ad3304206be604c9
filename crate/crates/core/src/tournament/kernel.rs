//! The round loop and the two solution translations (packings of the input into the
//! kernel, feedback vertex sets of the kernel back to the input).

use petgraph::algo::maximum_matching;
use petgraph::graph::UnGraph;

use crate::graph::{enumerate_triangles, Problem, Tournament};
use crate::rainbow::OracleConfig;
use crate::report::{KernelReport, RoundCase, RoundRecord};

use super::{
    apply_rule_tpt, c_delta, clean_tpt, compute_demand, greedy_localize_triangles, validate_tpt, BucketAllocation,
    Demand, TournamentLocalization, TournamentLocalizedPair, TptBuckets, TptError, TptPartialDecomp, TptRole,
    TptRuleOutcome,
};

/// Decomposition, demand and matching at the moment the rule stopped.
#[derive(Clone, Debug, PartialEq)]
pub struct TptFinalState {
    pub loc: TournamentLocalizedPair,
    pub decomp: TptPartialDecomp,
    pub buckets: TptBuckets,
    pub demand: Demand,
    pub allocation: BucketAllocation,
    pub mates: Vec<(usize, [usize; 2])>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TptKernelResult {
    pub report: KernelReport,
    /// `None` when the greedy packing settled the instance.
    pub final_state: Option<TptFinalState>,
}

impl TptKernelResult {
    pub fn kept(&self) -> &[usize] {
        &self.report.kept
    }

    pub fn settled(&self) -> Option<bool> {
        self.report.settled
    }
}

/// `6534 c(δ) k^δ`.
pub fn tournament_bound(delta: f64, k: usize) -> f64 {
    6534.0 * c_delta(delta) * (k as f64).powf(delta)
}

/// `min(2, 1 + sqrt(log2 21 / log2 k))`; 2 for `k < 2`, where the formula is undefined.
pub fn choose_delta(k: usize) -> f64 {
    if k < 2 {
        return 2.0;
    }
    (1.0 + 21f64.log2().sqrt() / (k as f64).log2().sqrt()).min(2.0)
}

fn potential(d: &TptPartialDecomp) -> usize {
    d.count(TptRole::W) + d.count(TptRole::C)
}

fn record(round: usize, case: RoundCase, d: &TptPartialDecomp) -> RoundRecord {
    RoundRecord {
        round,
        case,
        w: d.count(TptRole::W),
        b: d.b().len(),
        c: d.count(TptRole::C),
        f_bar: None,
        potential: potential(d),
        cleaned: 0,
        oracle: None,
        demand: None,
        invariants_ok: true,
    }
}

/// Kernelizes `(t, k)` for triangle packing or feedback vertex set.
///
/// The greedy packing settles packing instances at `k` triangles and feedback-vertex-set
/// instances at `k + 1`; the kept set is then the vertices of those triangles.
pub fn kernelize_tournament(
    t: &Tournament,
    k: usize,
    delta: f64,
    problem: Problem,
    cfg: &OracleConfig,
) -> Result<TptKernelResult, TptError> {
    kernelize_tournament_observed(t, k, delta, problem, cfg, &mut |_, _| {})
}

/// As [`kernelize_tournament`], handing every decomposition the loop accepts (each rule
/// output and each cleaned state, starting with the initial one) to `observe`.
pub fn kernelize_tournament_observed(
    t: &Tournament,
    k: usize,
    delta: f64,
    problem: Problem,
    cfg: &OracleConfig,
    observe: &mut dyn FnMut(&TournamentLocalizedPair, &TptPartialDecomp),
) -> Result<TptKernelResult, TptError> {
    if !(delta > 1.0 && delta <= 2.0) {
        return Err(TptError::PreconditionViolated(format!("delta must lie in (1, 2], got {delta}")));
    }
    if !problem.on_tournaments() {
        return Err(TptError::PreconditionViolated(format!("{problem} is not a tournament problem")));
    }
    let packing_problem = problem.is_packing();
    let threshold = if packing_problem { k } else { k + 1 };
    let c = c_delta(delta);
    let mut report = KernelReport {
        problem: problem.as_str().to_string(),
        n: t.n(),
        k,
        epsilon: Some(1.0),
        epsilon_prime: None,
        delta: Some(delta),
        c_delta: Some(c),
        greedy_packing: 0,
        c0: 0,
        w0: 0,
        settled: None,
        rounds: Vec::new(),
        kept_size: 0,
        kept: Vec::new(),
        bound_formula: format!("6534*c(delta)*k^delta with delta = {delta}, c(delta) = {c}, k = {k}"),
        bound_value: tournament_bound(delta, k),
        within_bound: false,
        tight_bound_value: None,
    };

    let loc = match greedy_localize_triangles(t, threshold) {
        TournamentLocalization::Reached(tris) => {
            let mut kept: Vec<usize> = tris.iter().flatten().copied().collect();
            kept.sort_unstable();
            report.greedy_packing = tris.len();
            report.c0 = kept.len();
            report.w0 = t.n() - kept.len();
            report.settled = Some(packing_problem);
            finish(&mut report, kept);
            return Ok(TptKernelResult { report, final_state: None });
        }
        TournamentLocalization::Pair(loc) => loc,
    };
    report.greedy_packing = loc.packing.len();
    report.c0 = loc.c0.len();
    report.w0 = loc.t0();
    report.tight_bound_value = Some(3.0 * (c + 1.0) * 11f64.powf(delta) * (loc.c0.len() as f64).powf(delta));

    let initial = TptPartialDecomp::initial(&loc, t.n(), delta);
    let (mut d, moved) = clean_tpt(t, &loc, &initial);
    let mut bk = validate_tpt(t, &loc, &d).map_err(|details| TptError::InvariantViolation { round: 0, details })?;
    observe(&loc, &d);
    let mut clean_round = record(0, RoundCase::Clean, &initial);
    clean_round.cleaned = moved.len();
    report.rounds.push(clean_round);
    let start_potential = potential(&d);

    for round in 1.. {
        if round > start_potential + 1 {
            return Err(TptError::InvariantViolation {
                round,
                details: vec![format!("round count exceeds the initial potential {start_potential}")],
            });
        }
        let profile = bk.profile(&d);
        let demand = compute_demand(&profile);
        let mut rec = record(round, RoundCase::Matching, &d);
        rec.demand = Some(demand.summary(&profile));
        let (outcome, stats) = apply_rule_tpt(t, &loc, &d, &bk, &demand, cfg)?;
        rec.oracle = Some(stats);
        match outcome {
            TptRuleOutcome::Stop { kept, allocation, mates } => {
                report.rounds.push(rec);
                finish(&mut report, kept);
                let final_state = TptFinalState { loc, decomp: d, buckets: bk, demand, allocation, mates };
                return Ok(TptKernelResult { report, final_state: Some(final_state) });
            }
            TptRuleOutcome::Next { decomp, case } => {
                rec.case = case;
                let violation = |details| TptError::InvariantViolation { round, details };
                validate_tpt(t, &loc, &decomp).map_err(violation)?;
                observe(&loc, &decomp);
                let (cleaned, moved) = clean_tpt(t, &loc, &decomp);
                let next_bk = validate_tpt(t, &loc, &cleaned).map_err(violation)?;
                observe(&loc, &cleaned);
                if potential(&cleaned) >= rec.potential {
                    return Err(violation(vec![format!(
                        "potential did not decrease: {} -> {}",
                        rec.potential,
                        potential(&cleaned)
                    )]));
                }
                rec.cleaned = moved.len();
                report.rounds.push(rec);
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

fn final_state(result: &TptKernelResult) -> Result<&TptFinalState, TptError> {
    result.final_state.as_ref().ok_or_else(|| {
        TptError::PreconditionViolated("the instance was settled by localization; there is no kernel state".into())
    })
}

/// Turns a feedback vertex set of the kernel `T[A]` into one of `t` that is no larger.
pub fn lift_fvs(t: &Tournament, result: &TptKernelResult, x: &[usize]) -> Result<Vec<usize>, TptError> {
    let state = final_state(result)?;
    let n = t.n();
    let kept = result.kept();
    let mut in_kept = vec![false; n];
    for &v in kept {
        in_kept[v] = true;
    }
    let mut in_x = vec![false; n];
    for &v in x {
        if v >= n || !in_kept[v] {
            return Err(TptError::InvalidSolution(format!("vertex {v} is not in the kernel")));
        }
        in_x[v] = true;
    }
    if let Some(tri) = enumerate_triangles(t, kept).into_iter().find(|tri| tri.iter().all(|&v| !in_x[v])) {
        return Err(TptError::InvalidSolution(format!("triangle {tri:?} of the kernel is not hit")));
    }
    let d = &state.decomp;
    let bk = &state.buckets;
    let mut ordinal = vec![usize::MAX; n];
    for (i, bucket) in bk.buckets.iter().enumerate() {
        for &v in bucket {
            ordinal[v] = i;
        }
    }
    // Closed ordinal spans of backward arcs between buckets that survive x.
    let mut spans: Vec<(usize, usize)> = Vec::new();
    for (i, bucket) in bk.buckets.iter().enumerate() {
        for &u in bucket.iter().filter(|&&u| !in_x[u]) {
            for bucket_j in &bk.buckets[..i] {
                if let Some(&v) = bucket_j.iter().find(|&&v| !in_x[v] && t.arc(u, v)) {
                    spans.push((ordinal[v], i));
                }
            }
        }
    }
    spans.sort_unstable();
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    for (a, b) in spans {
        match blocks.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => blocks.push((a, b)),
        }
    }
    let mut out: Vec<bool> = (0..n).map(|v| d.role[v] == TptRole::C || (d.role[v].in_b() && in_x[v])).collect();
    for (a, b) in blocks {
        let members = || bk.buckets[a..=b].iter().flatten().copied().filter(|&v| !in_x[v]);
        let s_cover: Vec<usize> = members().filter(|&v| matches!(d.role[v], TptRole::BC | TptRole::BW1)).collect();
        let largest = (a..=b).rev().max_by_key(|&i| bk.buckets[i].len()).expect("non-empty block");
        let rest_cover: Vec<usize> = members().filter(|&v| ordinal[v] != largest).collect();
        let cover = if s_cover.len() <= rest_cover.len() { s_cover } else { rest_cover };
        for v in cover {
            out[v] = true;
        }
    }
    let lifted: Vec<usize> = (0..n).filter(|&v| out[v]).collect();
    let all: Vec<usize> = (0..n).collect();
    if let Some(tri) = enumerate_triangles(t, &all).into_iter().find(|tri| tri.iter().all(|&v| !out[v])) {
        return Err(TptError::InvalidSolution(format!("lifted set misses triangle {tri:?}")));
    }
    Ok(lifted)
}

/// Reroutes triangles of `T[W ∪ B]` onto the allocated `W` vertices, keeping the `B` vertices.
pub fn repack_via_allocation(
    t: &Tournament,
    state: &TptFinalState,
    packing: &[[usize; 3]],
) -> Result<Vec<[usize; 3]>, TptError> {
    let d = &state.decomp;
    let bk = &state.buckets;
    let mut kept_triangles = Vec::new();
    // Backward arc (u in a later bucket, v in an earlier one) and the W vertex it uses.
    let mut arcs: Vec<(usize, usize, usize)> = Vec::new();
    for tri in packing {
        let ws: Vec<usize> = tri.iter().copied().filter(|&v| d.role[v] == TptRole::W).collect();
        if tri.iter().any(|&v| d.role[v] == TptRole::C) || ws.len() > 1 {
            return Err(TptError::PreconditionViolated(format!(
                "{tri:?} does not lie in T[W ∪ B] with one W vertex at most"
            )));
        }
        if ws.is_empty() {
            kept_triangles.push(*tri);
            continue;
        }
        let mut bs: Vec<usize> = tri.iter().copied().filter(|&v| d.role[v] != TptRole::W).collect();
        bs.sort_by_key(|&v| bk.bucket_of(v));
        let (v, u) = (bs[0], bs[1]);
        arcs.push((u, v, ws[0]));
    }
    let q = state.allocation.vertices();
    let mut graph = UnGraph::<(), ()>::new_undirected();
    let left: Vec<_> = arcs.iter().map(|_| graph.add_node(())).collect();
    let right: Vec<_> = q.iter().map(|_| graph.add_node(())).collect();
    for (i, &(u, v, _)) in arcs.iter().enumerate() {
        let (a, b) = (bk.bucket_of(v).expect("B vertex"), bk.bucket_of(u).expect("B vertex"));
        if a >= b {
            return Err(TptError::PreconditionViolated(format!("arc {u} -> {v} is not backward between buckets")));
        }
        let span = bk.interval(a, b);
        for (j, &w) in q.iter().enumerate() {
            let p = state.loc.position(w).expect("allocated vertices lie in the remainder");
            if span.contains_position(p) {
                graph.add_edge(left[i], right[j], ());
            }
        }
    }
    let matching = maximum_matching(&graph);
    let mut out = kept_triangles;
    for (i, &(u, v, w_old)) in arcs.iter().enumerate() {
        let Some(mate) = matching.mate(left[i]) else {
            return Err(TptError::RepackFailed(format!(
                "no allocated vertex left for arc {u} -> {v} (was through {w_old})"
            )));
        };
        let w = q[mate.index() - arcs.len()];
        if !t.is_triangle(u, v, w) {
            return Err(TptError::RepackFailed(format!("{u}, {v}, {w} is not a triangle")));
        }
        let mut tri = [u, v, w];
        tri.sort_unstable();
        out.push(tri);
    }
    Ok(out)
}

/// Turns a triangle packing of `t` into an equally large packing of the kernel `T[A]`.
pub fn restructure_packing_tpt(
    t: &Tournament,
    result: &TptKernelResult,
    packing: &[[usize; 3]],
) -> Result<Vec<[usize; 3]>, TptError> {
    let state = final_state(result)?;
    let d = &state.decomp;
    let mut used = vec![false; t.n()];
    for tri in packing {
        if !t.is_triangle(tri[0], tri[1], tri[2]) || tri.iter().any(|&v| std::mem::replace(&mut used[v], true)) {
            return Err(TptError::InvalidSolution(format!("{tri:?} breaks the packing")));
        }
    }
    let mut out = Vec::with_capacity(packing.len());
    let mut inner = Vec::new();
    for tri in packing {
        match tri.iter().copied().filter(|&v| d.role[v] == TptRole::C).min() {
            Some(c) => {
                let [u, w] = state.mates.iter().find(|m| m.0 == c).expect("every C vertex is matched").1;
                let mut new = [c, u, w];
                new.sort_unstable();
                out.push(new);
            }
            None => inner.push(*tri),
        }
    }
    out.extend(repack_via_allocation(t, state, &inner)?);
    let mut in_kept = vec![false; t.n()];
    for &v in result.kept() {
        in_kept[v] = true;
    }
    let mut seen = vec![false; t.n()];
    for tri in &out {
        let ok = t.is_triangle(tri[0], tri[1], tri[2])
            && tri.iter().all(|&v| in_kept[v] && !std::mem::replace(&mut seen[v], true));
        if !ok {
            return Err(TptError::InvalidSolution(format!("restructured triangle {tri:?} is not valid in the kernel")));
        }
    }
    Ok(out)
}
