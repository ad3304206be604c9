//! Kernel-size-versus-k sweeps written as append-only CSV.

use std::fs::OpenOptions;
use std::path::Path;

use anyhow::{Context, Result};
use rainbow_kernel::graph::generate_instance;
use rainbow_kernel::report::RoundCase;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{GenArgs, KernelArgs, RunConfig};
use crate::run::run_kernel;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub instance_id: String,
    pub problem: String,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub kept: usize,
    pub bound: f64,
    pub within_bound: bool,
    pub rounds: usize,
    pub clean: usize,
    pub case1: usize,
    pub case2: usize,
    pub matching: usize,
    /// `yes`, `no`, or empty when the rule loop ran.
    pub settled: String,
    pub invariants_ok: bool,
    pub wall_ms: f64,
    /// `true`, `false`, or `skipped`.
    pub verified: String,
}

impl BenchRecord {
    pub fn passed(&self) -> bool {
        self.within_bound && self.invariants_ok && self.verified != "false"
    }
}

pub struct Sweep<'a> {
    pub gen: &'a GenArgs,
    pub kernel: &'a KernelArgs,
    pub k_min: usize,
    pub k_max: usize,
    pub seeds: u64,
    pub base_seed: u64,
}

/// Runs every `(k, seed)` pair on a worker pool; records come back sorted by `(k, seed)`.
pub fn sweep(s: &Sweep<'_>) -> Result<Vec<BenchRecord>> {
    let jobs: Vec<(usize, u64)> =
        (s.k_min..=s.k_max).flat_map(|k| (0..s.seeds).map(move |i| (k, s.base_seed + i))).collect();
    let mut out = jobs
        .par_iter()
        .map(|&(k, seed)| -> Result<BenchRecord> {
            let gen = s.gen.generator(k)?;
            let inst = generate_instance(&gen, seed)?.instance;
            let id = format!("{}-{}-k{k}-s{seed}", gen.problem, s.gen.describe(k));
            let cfg = RunConfig::new("bench", gen.problem, id.clone(), k, seed, None, s.kernel)?;
            let run = run_kernel(&inst, &cfg).with_context(|| format!("instance {id}"))?;
            let r = &run.report;
            Ok(BenchRecord {
                instance_id: id,
                problem: r.problem.clone(),
                seed,
                n: r.n,
                k,
                kept: r.kept_size,
                bound: r.bound_value,
                within_bound: r.within_bound,
                rounds: r.rule_rounds(),
                clean: run.case_count(RoundCase::Clean),
                case1: run.case_count(RoundCase::Case1),
                case2: run.case_count(RoundCase::Case2),
                matching: run.case_count(RoundCase::Matching),
                settled: match r.settled {
                    Some(true) => "yes".into(),
                    Some(false) => "no".into(),
                    None => String::new(),
                },
                invariants_ok: r.all_invariants_ok() && r.potential_strictly_decreases(),
                wall_ms: run.wall_ms,
                verified: match run.equivalent {
                    Some(b) => b.to_string(),
                    None => "skipped".into(),
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by_key(|r| (r.k, r.seed));
    Ok(out)
}

/// Appends records to `path`, writing the header only when the file is new or empty.
pub fn append_records(path: &Path, records: &[BenchRecord]) -> Result<()> {
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let fresh = file.metadata()?.len() == 0;
    let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
