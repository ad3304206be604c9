//! Interval demand over a row of buckets.
//!
//! Everything here works on bucket ordinals `0..n` (the rank of a bucket index
//! in the sorted index set); an interval `(a, b)` with `a < b` covers ordinals
//! `a..=b`. Only two numbers per bucket matter: `|S_i|` and `|B_i^{W2}|`.

use rand::Rng;
use serde::Serialize;

use super::interval::{block_partition, maximal, BucketInterval};
use crate::report::DemandSummary;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BucketProfile {
    /// `|S_i|`: bucket vertices from the packing or moved there by Case 1.
    pub s: Vec<usize>,
    /// `|B_i^{W2}|`: remainder vertices merged in by Case 2.
    pub w2: Vec<usize>,
}

impl BucketProfile {
    pub fn new(s: Vec<usize>, w2: Vec<usize>) -> Self {
        assert_eq!(s.len(), w2.len(), "one entry per bucket");
        Self { s, w2 }
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn size(&self, i: usize) -> usize {
        self.s[i] + self.w2[i]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Tightness {
    /// `Σ < m`.
    Sigma,
    /// `m < Σ`.
    M,
    Equal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DemandStats {
    pub sigma: usize,
    pub m: usize,
    pub mu: usize,
    pub t: Tightness,
}

/// `Σ`, `m`, `μ = min(Σ, m)` and which side attains the minimum, for ordinals `a..=b`.
pub fn demand_stats(p: &BucketProfile, a: usize, b: usize) -> DemandStats {
    let sigma: usize = p.s[a..=b].iter().sum();
    let sizes = (a..=b).map(|i| p.size(i));
    let total: usize = sizes.clone().sum();
    let m = total - sizes.max().unwrap_or(0);
    let t = match sigma.cmp(&m) {
        std::cmp::Ordering::Less => Tightness::Sigma,
        std::cmp::Ordering::Greater => Tightness::M,
        std::cmp::Ordering::Equal => Tightness::Equal,
    };
    DemandStats { sigma, m, mu: sigma.min(m), t }
}

/// The demand `(ℐ, val)` of a profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Demand {
    n: usize,
    /// `Some(val)` for members of `ℐ`, row-major over `(a, b)`.
    val: Vec<Option<usize>>,
    /// Total value of members of `ℐ` inside `a..=b`.
    within: Vec<usize>,
}

impl Demand {
    pub fn buckets(&self) -> usize {
        self.n
    }

    /// `Some(val(I))` when `(a, b) ∈ ℐ`.
    pub fn val(&self, a: usize, b: usize) -> Option<usize> {
        if a < b && b < self.n {
            self.val[a * self.n + b]
        } else {
            None
        }
    }

    /// `val(P_ℐ(I))`.
    pub fn val_within(&self, a: usize, b: usize) -> usize {
        if a < b && b < self.n {
            self.within[a * self.n + b]
        } else {
            0
        }
    }

    /// Members of `ℐ` as `(a, b, val)`, ascending.
    pub fn intervals(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if let Some(v) = self.val(a, b) {
                    out.push((a, b, v));
                }
            }
        }
        out
    }

    /// Members of `ℐ_{>0}`.
    pub fn positive(&self) -> Vec<(usize, usize, usize)> {
        self.intervals().into_iter().filter(|&(_, _, v)| v > 0).collect()
    }

    pub fn summary(&self, p: &BucketProfile) -> DemandSummary {
        let all = self.intervals();
        DemandSummary {
            intervals: all.len(),
            positive_intervals: all.iter().filter(|x| x.2 > 0).count(),
            val_total: all.iter().map(|x| x.2).sum(),
            bucket_total: (0..p.len()).map(|i| p.size(i)).sum(),
        }
    }
}

/// Level-by-level demand computation; each level only reads strictly shorter intervals,
/// so `val(P_X(I))` comes from an inclusion-exclusion table.
pub fn compute_demand(p: &BucketProfile) -> Demand {
    let n = p.len();
    let mut val = vec![None; n * n];
    let mut within = vec![0usize; n * n];
    for len in 1..n {
        for a in 0..n - len {
            let b = a + len;
            let get = |x: usize, y: usize| if x < y { within[x * n + y] } else { 0 };
            let below = get(a + 1, b) + get(a, b - 1) - get(a + 1, b - 1);
            let mu = demand_stats(p, a, b).mu;
            let own = if below <= mu {
                val[a * n + b] = Some(mu - below);
                mu - below
            } else {
                0
            };
            within[a * n + b] = below + own;
        }
    }
    Demand { n, val, within }
}

/// The literal set-based algorithm with an explicit visiting order inside each level.
/// Slow; kept as a cross-check for [`compute_demand`].
pub fn compute_demand_in_order(p: &BucketProfile, reverse_within_level: bool) -> Demand {
    let n = p.len();
    let mut members: Vec<(usize, usize, usize)> = Vec::new();
    for len in 1..n {
        let mut level: Vec<usize> = (0..n - len).collect();
        if reverse_within_level {
            level.reverse();
        }
        for a in level {
            let b = a + len;
            let below: usize = members.iter().filter(|&&(x, y, _)| a <= x && y <= b).map(|m| m.2).sum();
            let mu = demand_stats(p, a, b).mu;
            if below <= mu {
                members.push((a, b, mu - below));
            }
        }
    }
    let mut val = vec![None; n * n];
    let mut within = vec![0; n * n];
    for &(a, b, v) in &members {
        val[a * n + b] = Some(v);
    }
    for a in 0..n {
        for b in a + 1..n {
            within[a * n + b] = members.iter().filter(|&&(x, y, _)| a <= x && y <= b).map(|m| m.2).sum();
        }
    }
    Demand { n, val, within }
}

fn argmax_sizes(p: &BucketProfile, a: usize, b: usize) -> Vec<usize> {
    let best = (a..=b).map(|i| p.size(i)).max().unwrap_or(0);
    (a..=b).filter(|&i| p.size(i) == best).collect()
}

fn iv(a: usize, b: usize) -> BucketInterval {
    BucketInterval { l: a, r: b }
}

/// Checks the structural properties the kernel's size argument relies on.
///
/// Returns one message per failed check; an empty list means every property held.
/// `subset_samples` random subsets of `ℐ_{>0}` are tried for the total-demand bound,
/// or all subsets when there are at most 12 positive intervals.
pub fn audit_demand<R: Rng>(p: &BucketProfile, d: &Demand, rng: &mut R, subset_samples: usize) -> Vec<String> {
    let n = p.len();
    let mut errs = Vec::new();
    for reverse in [false, true] {
        if compute_demand_in_order(p, reverse) != *d {
            errs.push(format!("set-based computation (reverse = {reverse}) disagrees"));
        }
    }
    let positive = d.positive();
    for a in 0..n {
        for b in a + 1..n {
            let st = demand_stats(p, a, b);
            let all = d.val_within(a, b);
            let own = d.val(a, b);
            let others = all - own.unwrap_or(0);
            let pos_within: usize = positive.iter().filter(|&&(x, y, _)| a <= x && y <= b).map(|x| x.2).sum();
            let tag = format!("({a},{b})");
            if all != pos_within {
                errs.push(format!("{tag}: zero-valued members change the inner total"));
            }
            if all < st.mu {
                errs.push(format!("{tag}: inner total {all} below mu {}", st.mu));
            }
            let member = own.is_some();
            if member != (all == st.mu) || member != (others <= st.mu) {
                errs.push(format!("{tag}: membership does not match the inner totals"));
            }
            if own.is_some_and(|v| v > 0) != (others < st.mu) {
                errs.push(format!("{tag}: positivity does not match the inner totals"));
            }
            let arg = argmax_sizes(p, a, b);
            let w2_rest = |i0: usize| -> usize { (a..=b).filter(|&i| i != i0).map(|i| p.w2[i]).sum() };
            if st.t == Tightness::Sigma && !arg.iter().all(|&i0| p.s[i0] < w2_rest(i0)) {
                errs.push(format!("{tag}: sigma-tight but a largest bucket has |S| >= other W2 mass"));
            }
            if arg.iter().any(|&i0| p.s[i0] < w2_rest(i0)) && st.t != Tightness::Sigma {
                errs.push(format!("{tag}: a largest bucket has |S| < other W2 mass but not sigma-tight"));
            }
            if st.t == Tightness::M && !arg.iter().all(|&i0| p.s[i0] > w2_rest(i0)) {
                errs.push(format!("{tag}: m-tight but a largest bucket has |S| <= other W2 mass"));
            }
        }
    }
    // Crossing pairs of positive intervals meet in a sigma-tight interval.
    for &(a1, b1, _) in &positive {
        for &(a2, b2, _) in &positive {
            if let Ok(m) = iv(a1, b1).meet(&iv(a2, b2)) {
                if demand_stats(p, m.l, m.r).t != Tightness::Sigma {
                    errs.push(format!("meet of ({a1},{b1}) and ({a2},{b2}) is not sigma-tight"));
                }
            }
        }
    }
    // Every crossing chain of positive intervals has its join in the demand.
    let mut stack: Vec<Vec<BucketInterval>> = positive.iter().map(|&(a, b, _)| vec![iv(a, b)]).collect();
    while let Some(chain) = stack.pop() {
        let last = *chain.last().expect("non-empty chain");
        let join = chain.iter().fold(chain[0], |acc, x| acc.join(x));
        if d.val(join.l, join.r).is_none() {
            errs.push(format!("join of chain {chain:?} is not in the demand"));
        }
        for &(a, b, _) in &positive {
            if last.precedes(&iv(a, b)) {
                let mut next = chain.clone();
                next.push(iv(a, b));
                stack.push(next);
            }
        }
    }
    // Total demand of any subset is bounded by mu of its block intervals.
    let q = positive.len();
    let check_subset = |mask: &[bool], errs: &mut Vec<String>| {
        let chosen: Vec<(usize, usize, usize)> = positive.iter().zip(mask).filter(|x| *x.1).map(|x| *x.0).collect();
        if chosen.is_empty() {
            return;
        }
        let total: usize = chosen.iter().map(|x| x.2).sum();
        let ivs: Vec<BucketInterval> = chosen.iter().map(|&(a, b, _)| iv(a, b)).collect();
        let (_, joins) = block_partition(&maximal(&ivs)).expect("maximal sets are proper");
        let bound: usize = joins.iter().map(|j| demand_stats(p, j.l, j.r).mu).sum();
        if total > bound {
            errs.push(format!("subset {chosen:?} has total {total} above block bound {bound}"));
        }
    };
    if q <= 12 {
        for bits in 1u32..(1 << q) {
            let mask: Vec<bool> = (0..q).map(|i| bits >> i & 1 == 1).collect();
            check_subset(&mask, &mut errs);
        }
    } else {
        for _ in 0..subset_samples {
            let mask: Vec<bool> = (0..q).map(|_| rng.gen_bool(0.5)).collect();
            check_subset(&mask, &mut errs);
        }
    }
    errs
}
