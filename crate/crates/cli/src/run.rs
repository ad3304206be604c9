//! One kernelization run plus the optional exact equivalence check.

use std::time::Instant;

use anyhow::Result;
use rainbow_kernel::exact::decide;
use rainbow_kernel::graph::{InstanceSpec, Payload};
use rainbow_kernel::p3::kernelize_p3;
use rainbow_kernel::rainbow::OracleConfig;
use rainbow_kernel::report::{KernelReport, RoundCase};
use rainbow_kernel::tournament::kernelize_tournament;

use crate::config::RunConfig;

pub struct KernelRun {
    pub report: KernelReport,
    pub kernel: InstanceSpec,
    /// `None` when not requested or the instance exceeds the exact-solver limit.
    pub equivalent: Option<bool>,
    pub wall_ms: f64,
}

impl KernelRun {
    pub fn case_count(&self, case: RoundCase) -> usize {
        self.report.rounds.iter().filter(|r| r.case == case).count()
    }

    /// Bound, invariants, potential and (when run) equivalence all hold.
    pub fn passed(&self) -> bool {
        self.report.within_bound
            && self.report.all_invariants_ok()
            && self.report.potential_strictly_decreases()
            && self.equivalent != Some(false)
    }
}

/// The sub-instance induced on `kept`, with the same problem and parameter.
pub fn induced_instance(inst: &InstanceSpec, kept: &[usize]) -> InstanceSpec {
    let payload = match &inst.payload {
        Payload::Graph(g) => Payload::Graph(g.induced(kept)),
        Payload::Tournament(t) => Payload::Tournament(t.induced(kept)),
    };
    InstanceSpec { problem: inst.problem, k: inst.k, payload }
}

/// Whether both instances get the same yes/no answer; `None` when either is too large.
pub fn equivalent(a: &InstanceSpec, b: &InstanceSpec, limit: usize) -> Option<bool> {
    let x = decide(a, limit).ok()?.0;
    let y = decide(b, limit).ok()?.0;
    Some(x == y)
}

pub fn run_kernel(inst: &InstanceSpec, cfg: &RunConfig) -> Result<KernelRun> {
    let oracle = OracleConfig::default();
    let start = Instant::now();
    let report = match &inst.payload {
        Payload::Graph(g) => kernelize_p3(g, inst.k, cfg.epsilon.unwrap_or(1.0), inst.problem, &oracle)?.report,
        Payload::Tournament(t) => {
            kernelize_tournament(t, inst.k, cfg.delta.unwrap_or(2.0), inst.problem, &oracle)?.report
        }
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let kernel = induced_instance(inst, &report.kept);
    let equivalent = if cfg.verify { equivalent(inst, &kernel, cfg.oracle_limit) } else { None };
    Ok(KernelRun { report, kernel, equivalent, wall_ms })
}
