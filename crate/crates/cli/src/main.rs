mod bench;
mod config;
mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rainbow_kernel::exact::{solve, DEFAULT_GRAPH_LIMIT, DEFAULT_TOURNAMENT_LIMIT};
use rainbow_kernel::graph::{generate_instance, parse_instance, serialize_instance, InstanceSpec};
use rainbow_kernel::report::{KernelReport, RoundCase};
use rainbow_kernel::solution::{check_witness, meets_k, parse_witness, serialize_witness};
use serde::Serialize;

use crate::bench::{append_records, sweep, Sweep};
use crate::config::{GenArgs, KernelArgs, RunConfig, ORACLE_LIMIT_ENV};
use crate::run::{equivalent, run_kernel};

#[derive(Parser)]
#[command(name = "rbk", version, about = "Rainbow-matching kernels for triangle and induced-P3 problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shrink an instance to an equivalent induced sub-instance.
    Kernelize {
        /// Instance file; omit to generate one from the family flags.
        #[arg(long, conflicts_with = "family")]
        input: Option<PathBuf>,
        #[command(flatten)]
        gen: GenArgs,
        /// Overrides the parameter from the instance header; required when generating.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        kernel: KernelArgs,
        /// Where to write the kernel instance.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the JSON report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Solve an instance exactly.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, env = ORACLE_LIMIT_ENV)]
        oracle_limit: Option<usize>,
        /// Where to write the optimal witness.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a solution file, or the equivalence of an instance and a kernel.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, required_unless_present = "kernel", conflicts_with = "kernel")]
        solution: Option<PathBuf>,
        #[arg(long)]
        kernel: Option<PathBuf>,
        #[arg(long, env = ORACLE_LIMIT_ENV)]
        oracle_limit: Option<usize>,
    },
    /// Write a generated instance.
    Gen {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep k and seeds over a generator family and append CSV records.
    Bench {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value_t = 1)]
        k_min: usize,
        #[arg(long, default_value_t = 5)]
        k_max: usize,
        /// Seeds per k, counting up from --seed.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_instance(path: &Path) -> Result<InstanceSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn default_limit(inst: &InstanceSpec) -> usize {
    if inst.problem.on_tournaments() {
        DEFAULT_TOURNAMENT_LIMIT
    } else {
        DEFAULT_GRAPH_LIMIT
    }
}

#[derive(Serialize)]
struct ReportFile<'a> {
    config: &'a RunConfig,
    #[serde(flatten)]
    report: &'a KernelReport,
    equivalent: Option<bool>,
    wall_ms: f64,
}

fn print_flag(name: &str, v: Option<bool>) {
    match v {
        Some(b) => println!("{name}: {b}"),
        None => println!("{name}: skipped"),
    }
}

fn kernelize(
    input: Option<PathBuf>,
    gen: GenArgs,
    k: Option<usize>,
    seed: u64,
    kargs: KernelArgs,
    out: Option<PathBuf>,
    report_path: Option<PathBuf>,
) -> Result<bool> {
    let (mut inst, source) = match input {
        Some(p) => (read_instance(&p)?, p.display().to_string()),
        None => {
            let Some(k) = k else { bail!("--k is required when generating the instance") };
            let cfg = gen.generator(k)?;
            (generate_instance(&cfg, seed)?.instance, format!("{}-s{seed}", gen.describe(k)))
        }
    };
    if let Some(k) = k {
        inst.k = k;
    }
    let cfg = RunConfig::new("kernelize", inst.problem, source, inst.k, seed, out.clone(), &kargs)?;
    let run = run_kernel(&inst, &cfg)?;
    if let Some(p) = &out {
        write(p, &serialize_instance(&run.kernel))?;
    }
    let r = &run.report;
    if let Some(p) = &report_path {
        let file = ReportFile { config: &cfg, report: r, equivalent: run.equivalent, wall_ms: run.wall_ms };
        write(p, &(serde_json::to_string_pretty(&file)? + "\n"))?;
    }
    println!("problem: {}", r.problem);
    println!("n: {}", r.n);
    println!("k: {}", r.k);
    if let Some(d) = r.delta {
        println!("delta: {d}");
    }
    if let Some(e) = r.epsilon {
        println!("epsilon: {e}");
    }
    println!("kept: {}", r.kept_size);
    println!("bound: {} = {}", r.bound_formula, r.bound_value);
    println!("within_bound: {}", r.within_bound);
    println!(
        "rounds: {} (case1 {}, case2 {}, matching {})",
        r.rule_rounds(),
        run.case_count(RoundCase::Case1),
        run.case_count(RoundCase::Case2),
        run.case_count(RoundCase::Matching)
    );
    println!("invariants_ok: {}", r.all_invariants_ok() && r.potential_strictly_decreases());
    if cfg.verify {
        print_flag("equivalent", run.equivalent);
    }
    Ok(run.passed())
}

fn cmd_solve(input: PathBuf, limit: Option<usize>, out: Option<PathBuf>) -> Result<bool> {
    let inst = read_instance(&input)?;
    let ans = solve(&inst, limit.unwrap_or(default_limit(&inst)))?;
    println!("problem: {}", inst.problem);
    println!("value: {}", ans.value);
    println!("yes_for_k: {}", ans.decides(inst.k));
    let text = serialize_witness(&ans.witness);
    match out {
        Some(p) => write(&p, &text)?,
        None => print!("{text}"),
    }
    Ok(true)
}

fn cmd_verify(
    input: PathBuf,
    solution: Option<PathBuf>,
    kernel: Option<PathBuf>,
    limit: Option<usize>,
) -> Result<bool> {
    let inst = read_instance(&input)?;
    if let Some(sol) = solution {
        let text = fs::read_to_string(&sol).with_context(|| format!("reading {}", sol.display()))?;
        let w = parse_witness(&text).with_context(|| format!("parsing {}", sol.display()))?;
        return Ok(match check_witness(&inst, &w) {
            Ok(()) => {
                println!("valid: true");
                println!("size: {}", w.len());
                println!("meets_k: {}", meets_k(&inst, &w));
                true
            }
            Err(why) => {
                println!("valid: false");
                println!("reason: {why}");
                false
            }
        });
    }
    let kern = read_instance(kernel.as_deref().expect("clap requires one of the two"))?;
    if kern.problem != inst.problem || kern.k != inst.k {
        bail!("kernel header does not match the instance header");
    }
    let limit = limit.unwrap_or(default_limit(&inst));
    match equivalent(&inst, &kern, limit) {
        Some(eq) => {
            println!("equivalent: {eq}");
            Ok(eq)
        }
        None => bail!("instance exceeds the exact-solver limit {limit}"),
    }
}

fn cmd_gen(gen: GenArgs, k: usize, seed: u64, out: Option<PathBuf>) -> Result<bool> {
    let inst = generate_instance(&gen.generator(k)?, seed)?.instance;
    let text = serialize_instance(&inst);
    match out {
        Some(p) => write(&p, &text)?,
        None => print!("{text}"),
    }
    Ok(true)
}

fn cmd_bench(s: Sweep<'_>, out: PathBuf) -> Result<bool> {
    let records = sweep(&s)?;
    append_records(&out, &records)?;
    let failed = records.iter().filter(|r| !r.passed()).count();
    let verified = records.iter().filter(|r| r.verified == "true").count();
    println!("records: {}", records.len());
    println!("all_within_bound: {}", records.iter().all(|r| r.within_bound));
    println!("verified: {verified}/{}", records.len());
    println!("failed: {failed}");
    Ok(failed == 0)
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Kernelize { input, gen, k, seed, kernel, out, report } => {
            kernelize(input, gen, k, seed, kernel, out, report)
        }
        Command::Solve { input, oracle_limit, out } => cmd_solve(input, oracle_limit, out),
        Command::Verify { input, solution, kernel, oracle_limit } => cmd_verify(input, solution, kernel, oracle_limit),
        Command::Gen { gen, k, seed, out } => cmd_gen(gen, k, seed, out),
        Command::Bench { gen, k_min, k_max, seeds, seed, kernel, out } => {
            if k_min > k_max {
                bail!("--k-min exceeds --k-max");
            }
            cmd_bench(Sweep { gen: &gen, kernel: &kernel, k_min, k_max, seeds, base_seed: seed }, out)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
