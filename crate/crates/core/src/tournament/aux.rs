//! Auxiliary colored graph on `W`, the two add operations, and the reduction rule.

use serde::Serialize;

use crate::graph::{ColoredEdge, ColoredMultigraph, EdgeShape, Tournament};
use crate::rainbow::{rainbow_or_cover_with, verify_outcome, OracleConfig, OracleStats, Outcome};
use crate::report::RoundCase;

use super::{
    block_partition, demand_stats, forms_triangle_with_w, maximal, BucketInterval, Demand, TournamentLocalizedPair,
    TptBuckets, TptError, TptPartialDecomp, TptRole,
};

/// Oracle slack used by the tournament rule.
const RULE_EPSILON: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ColorSource {
    /// A `C` vertex; its edges are the `W` pairs it forms a triangle with.
    C(usize),
    /// One of the `val(I)` loop colors of a positive demand interval (bucket ordinals).
    D(BucketInterval),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TptAuxGraph {
    pub graph: ColoredMultigraph,
    /// Local vertex index -> original id, in topological order.
    pub w_ids: Vec<usize>,
    pub colors: Vec<ColorSource>,
    /// Number of leading colors that come from `C`.
    pub c_colors: usize,
}

/// Pair edges `{u, w}` colored `c` for each triangle `c -> u -> w -> c`; then, for every positive
/// demand interval in ascending order, `val(I)` colors each with a loop on every vertex of `W(I)`.
pub fn build_tpt_aux(
    t: &Tournament,
    loc: &TournamentLocalizedPair,
    d: &TptPartialDecomp,
    buckets: &TptBuckets,
    demand: &Demand,
) -> TptAuxGraph {
    let w_ids: Vec<usize> = loc.w0.iter().copied().filter(|&v| d.role[v] == TptRole::W).collect();
    let mut local = vec![usize::MAX; t.n()];
    for (i, &v) in w_ids.iter().enumerate() {
        local[v] = i;
    }
    let mut colors: Vec<ColorSource> = d.members(TptRole::C).into_iter().map(ColorSource::C).collect();
    let c_colors = colors.len();
    let mut edges = Vec::new();
    for (color, src) in colors.iter().enumerate() {
        let ColorSource::C(c) = *src else { unreachable!() };
        for (a, &u) in w_ids.iter().enumerate() {
            if !t.arc(c, u) {
                continue;
            }
            for (b, &w) in w_ids.iter().enumerate().skip(a + 1) {
                if t.arc(w, c) {
                    edges.push(ColoredEdge { shape: EdgeShape::Pair(a, b), color });
                }
            }
        }
    }
    for (a, b, val) in demand.positive() {
        let iv = BucketInterval { l: a, r: b };
        let w_part = buckets.w_of(loc, d, buckets.interval(a, b));
        for _ in 0..val {
            let color = colors.len();
            colors.push(ColorSource::D(iv));
            for &v in &w_part {
                edges.push(ColoredEdge { shape: EdgeShape::Loop(local[v]), color });
            }
        }
    }
    let graph = ColoredMultigraph::new(w_ids.len(), colors.len(), edges)
        .expect("clean decompositions and non-empty W(I) give every color an edge");
    TptAuxGraph { graph, w_ids, colors, c_colors }
}

/// `Q_I` for each positive demand interval (bucket ordinals).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BucketAllocation {
    pub q: Vec<(BucketInterval, Vec<usize>)>,
}

impl BucketAllocation {
    pub fn vertices(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.q.iter().flat_map(|(_, s)| s.iter().copied()).collect();
        out.sort_unstable();
        out
    }

    /// `Q_I ⊆ W(I)`, `|Q_I| = val(I)`, pairwise disjoint, one entry per positive interval.
    pub fn check(
        &self,
        loc: &TournamentLocalizedPair,
        d: &TptPartialDecomp,
        buckets: &TptBuckets,
        demand: &Demand,
    ) -> Result<(), String> {
        let positive = demand.positive();
        if positive.len() != self.q.len() {
            return Err(format!("{} allocated intervals for {} positive ones", self.q.len(), positive.len()));
        }
        let mut seen = vec![false; d.role.len()];
        for ((a, b, val), (iv, set)) in positive.into_iter().zip(&self.q) {
            if (iv.l, iv.r) != (a, b) {
                return Err(format!("allocation lists {iv:?} where ({a}, {b}) was expected"));
            }
            if set.len() != val {
                return Err(format!("interval {iv:?} gets {} vertices instead of {val}", set.len()));
            }
            let w_part = buckets.w_of(loc, d, buckets.interval(a, b));
            for &v in set {
                if !w_part.contains(&v) {
                    return Err(format!("vertex {v} allocated to {iv:?} lies outside W(I)"));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(format!("vertex {v} is allocated twice"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TptRuleOutcome {
    Stop {
        kept: Vec<usize>,
        allocation: BucketAllocation,
        /// `C` vertex -> the `W` pair of its matching edge.
        mates: Vec<(usize, [usize; 2])>,
    },
    Next {
        decomp: TptPartialDecomp,
        case: RoundCase,
    },
}

fn check_subset(d: &TptPartialDecomp, set: &[usize], role: TptRole, what: &str) -> Result<(), TptError> {
    match set.iter().find(|&&v| v >= d.role.len() || d.role[v] != role) {
        Some(v) => Err(TptError::PreconditionViolated(format!("{what} vertex {v} is not in {role:?}"))),
        None => Ok(()),
    }
}

/// Moves `u ⊆ W` into the buckets as Case-1 remainder vertices and `xc ⊆ C` as packing vertices.
pub fn add1(
    t: &Tournament,
    loc: &TournamentLocalizedPair,
    d: &TptPartialDecomp,
    u: &[usize],
    xc: &[usize],
) -> Result<TptPartialDecomp, TptError> {
    check_subset(d, u, TptRole::W, "U")?;
    check_subset(d, xc, TptRole::C, "X^C")?;
    if u.len() > 10 * xc.len() {
        return Err(TptError::PreconditionViolated(format!("|U| = {} exceeds 10|X^C| = {}", u.len(), 10 * xc.len())));
    }
    let mut next = d.clone();
    for &v in u {
        next.role[v] = TptRole::BW1;
    }
    let rest: Vec<usize> = loc.w0.iter().copied().filter(|&v| next.role[v] == TptRole::W).collect();
    if let Some(&x) = xc.iter().find(|&&x| forms_triangle_with_w(t, &rest, x)) {
        return Err(TptError::PreconditionViolated(format!("{x} still forms a triangle with two vertices of W \\ U")));
    }
    for &x in xc {
        next.role[x] = TptRole::BC;
    }
    Ok(next)
}

/// Merges the buckets of `iv` (bucket ordinals) together with `W(iv)`, which becomes Case-2 mass.
pub fn add2(
    loc: &TournamentLocalizedPair,
    d: &TptPartialDecomp,
    buckets: &TptBuckets,
    iv: BucketInterval,
) -> Result<TptPartialDecomp, TptError> {
    if !(iv.l < iv.r && iv.r < buckets.indices.len()) {
        return Err(TptError::PreconditionViolated(format!("{iv:?} is not an interval of bucket ordinals")));
    }
    let u = buckets.w_of(loc, d, buckets.interval(iv.l, iv.r));
    let mu = demand_stats(&buckets.profile(d), iv.l, iv.r).mu;
    if u.is_empty() || u.len() > 10 * mu {
        return Err(TptError::PreconditionViolated(format!(
            "|W(I)| = {} is not in 1..=10 mu(I) = {}",
            u.len(),
            10 * mu
        )));
    }
    let mut next = d.clone();
    for v in u {
        next.role[v] = TptRole::BW2;
    }
    Ok(next)
}

/// One application of the reduction rule to a clean decomposition.
pub fn apply_rule_tpt(
    t: &Tournament,
    loc: &TournamentLocalizedPair,
    d: &TptPartialDecomp,
    buckets: &TptBuckets,
    demand: &Demand,
    cfg: &OracleConfig,
) -> Result<(TptRuleOutcome, OracleStats), TptError> {
    let aux = build_tpt_aux(t, loc, d, buckets, demand);
    let (outcome, stats) = rainbow_or_cover_with(&aux.graph, RULE_EPSILON, cfg);
    let check = verify_outcome(&aux.graph, &outcome);
    if !check.ok {
        return Err(TptError::OracleContractViolation(format!("{:?}", check.violations)));
    }
    let result = match outcome {
        Outcome::Matching(m) => {
            let mut kept: Vec<usize> = (0..t.n()).filter(|&v| d.role[v] != TptRole::W).collect();
            let mut mates = Vec::new();
            let mut allocation = BucketAllocation::default();
            for (color, &e) in m.edges.iter().enumerate() {
                let ends: Vec<usize> = aux.graph.edge(e).shape.iter().map(|x| aux.w_ids[x]).collect();
                kept.extend_from_slice(&ends);
                match aux.colors[color] {
                    ColorSource::C(c) => mates.push((c, [ends[0], ends[1]])),
                    ColorSource::D(iv) => match allocation.q.last_mut() {
                        Some((last, set)) if *last == iv => set.push(ends[0]),
                        _ => allocation.q.push((iv, vec![ends[0]])),
                    },
                }
            }
            for (_, set) in &mut allocation.q {
                set.sort_unstable();
            }
            allocation.check(loc, d, buckets, demand).map_err(TptError::OracleContractViolation)?;
            kept.sort_unstable();
            TptRuleOutcome::Stop { kept, allocation, mates }
        }
        Outcome::Cover(cc) => {
            let cover: Vec<usize> = cc.cover.iter().map(|&x| aux.w_ids[x]).collect();
            if cover.len() > 5 * cc.colors.len() {
                return Err(TptError::OracleContractViolation(format!(
                    "cover of size {} exceeds 5 * {} colors",
                    cover.len(),
                    cc.colors.len()
                )));
            }
            let (x_c, x_d): (Vec<usize>, Vec<usize>) = cc.colors.iter().partition(|&&col| col < aux.c_colors);
            if x_d.len() <= x_c.len() {
                let xc: Vec<usize> = x_c
                    .iter()
                    .map(|&col| match aux.colors[col] {
                        ColorSource::C(c) => c,
                        ColorSource::D(_) => unreachable!("leading colors come from C"),
                    })
                    .collect();
                TptRuleOutcome::Next { decomp: add1(t, loc, d, &cover, &xc)?, case: RoundCase::Case1 }
            } else {
                let iv = select_case2_interval(loc, d, buckets, &aux, &x_d, &cover)?;
                TptRuleOutcome::Next { decomp: add2(loc, d, buckets, iv)?, case: RoundCase::Case2 }
            }
        }
    };
    Ok((result, stats))
}

/// Block intervals of the maximal hit demand intervals; the first whose `W` part fits in `10 mu`.
fn select_case2_interval(
    loc: &TournamentLocalizedPair,
    d: &TptPartialDecomp,
    buckets: &TptBuckets,
    aux: &TptAuxGraph,
    x_d: &[usize],
    cover: &[usize],
) -> Result<BucketInterval, TptError> {
    let mut hit: Vec<BucketInterval> = x_d
        .iter()
        .map(|&col| match aux.colors[col] {
            ColorSource::D(iv) => iv,
            ColorSource::C(_) => unreachable!("trailing colors come from demand intervals"),
        })
        .collect();
    hit.sort();
    hit.dedup();
    let (_, joins) = block_partition(&maximal(&hit))?;
    let profile = buckets.profile(d);
    let mut sizes = Vec::with_capacity(joins.len());
    for join in &joins {
        let w_part = buckets.w_of(loc, d, buckets.interval(join.l, join.r));
        if let Some(v) = w_part.iter().find(|v| !cover.contains(v)) {
            return Err(TptError::OracleContractViolation(format!("{v} in W({join:?}) is outside the cover")));
        }
        let mu = demand_stats(&profile, join.l, join.r).mu;
        if w_part.len() <= 10 * mu {
            return Ok(*join);
        }
        sizes.push((*join, w_part.len(), mu));
    }
    Err(TptError::Case2SelectionFailed(format!("(interval, |W(I)|, mu) = {sizes:?}")))
}
