//! Per-run trace shared by both kernels, serialized as pretty JSON.

use serde::Serialize;

use crate::rainbow::OracleStats;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundCase {
    /// Cleaning before the first rule application.
    Clean,
    Matching,
    Case1,
    Case2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DemandSummary {
    pub intervals: usize,
    pub positive_intervals: usize,
    pub val_total: usize,
    pub bucket_total: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    pub case: RoundCase,
    /// Sizes of the decomposition the round started from (after cleaning).
    pub w: usize,
    pub b: usize,
    pub c: usize,
    /// Number of non-empty cliques (P3 kernel only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_bar: Option<usize>,
    pub potential: usize,
    /// Vertices moved from C to B by the cleaning that followed this round's rule.
    pub cleaned: usize,
    pub oracle: Option<OracleStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub demand: Option<DemandSummary>,
    pub invariants_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelReport {
    pub problem: String,
    pub n: usize,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Additive constant in `(243 + eps')k` implied by `epsilon`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_prime: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_delta: Option<f64>,
    pub greedy_packing: usize,
    pub c0: usize,
    pub w0: usize,
    /// `Some(answer)` when the greedy packing alone settled the instance.
    pub settled: Option<bool>,
    pub rounds: Vec<RoundRecord>,
    pub kept_size: usize,
    pub kept: Vec<usize>,
    pub bound_formula: String,
    pub bound_value: f64,
    pub within_bound: bool,
    /// Tighter intermediate bound from the matching-case analysis, when it applies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tight_bound_value: Option<f64>,
}

impl KernelReport {
    pub fn to_text(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Rule applications (rounds other than the initial cleaning).
    pub fn rule_rounds(&self) -> usize {
        self.rounds.iter().filter(|r| r.case != RoundCase::Clean).count()
    }

    pub fn all_invariants_ok(&self) -> bool {
        self.rounds.iter().all(|r| r.invariants_ok)
    }

    /// Potential values of consecutive rule rounds strictly decrease.
    pub fn potential_strictly_decreases(&self) -> bool {
        let p: Vec<usize> = self.rounds.iter().filter(|r| r.case != RoundCase::Clean).map(|r| r.potential).collect();
        p.windows(2).all(|w| w[1] < w[0])
    }
}
