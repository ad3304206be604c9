//! Command-line arguments and their resolution into a validated run configuration.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use rainbow_kernel::exact::{DEFAULT_GRAPH_LIMIT, DEFAULT_TOURNAMENT_LIMIT};
use rainbow_kernel::graph::{Family, GeneratorConfig, Problem};
use rainbow_kernel::tournament::choose_delta;
use serde::Serialize;

pub const ORACLE_LIMIT_ENV: &str = "RBK_ORACLE_LIMIT";

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DeltaArg {
    Auto,
    Fixed(f64),
}

impl FromStr for DeltaArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(DeltaArg::Auto);
        }
        s.parse::<f64>().map(DeltaArg::Fixed).map_err(|_| format!("expected a number or `auto`, got `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// Uniformly random tournament on `--n` vertices.
    Uniform,
    /// Erdős–Rényi graph G(`--n`, `--p`).
    Er,
    /// Planted disjoint triangles in a noisy transitive tournament.
    PlantedTriangles,
    /// Planted disjoint induced P3s in a noisy cluster graph.
    PlantedP3,
}

impl FamilyKind {
    fn default_problem(self) -> Problem {
        match self {
            FamilyKind::Uniform | FamilyKind::PlantedTriangles => Problem::Tpt,
            FamilyKind::Er | FamilyKind::PlantedP3 => Problem::I2pp,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Uniform => "uniform",
            FamilyKind::Er => "er",
            FamilyKind::PlantedTriangles => "planted-triangles",
            FamilyKind::PlantedP3 => "planted-p3",
        }
    }
}

fn parse_problem(s: &str) -> Result<Problem, String> {
    s.parse()
}

#[derive(Args, Clone, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    /// Problem written into the instance header; defaults by family.
    #[arg(long, value_parser = parse_problem)]
    pub problem: Option<Problem>,
    /// Vertex count for the uniform and er families.
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    /// Edge probability for the er family.
    #[arg(long, default_value_t = 0.3)]
    pub p: f64,
    /// Planted obstructions; defaults to k.
    #[arg(long)]
    pub planted: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub filler: usize,
    #[arg(long, default_value_t = 0.05)]
    pub noise: f64,
}

impl GenArgs {
    pub fn generator(&self, k: usize) -> Result<GeneratorConfig> {
        let Some(kind) = self.family else { bail!("a generator family is required (--family)") };
        let planted = self.planted.unwrap_or(k);
        let family = match kind {
            FamilyKind::Uniform => Family::UniformTournament { n: self.n },
            FamilyKind::Er => Family::ErdosRenyi { n: self.n, p: self.p },
            FamilyKind::PlantedTriangles => {
                Family::PlantedTriangles { planted, filler: self.filler, noise: self.noise }
            }
            FamilyKind::PlantedP3 => Family::PlantedP3 { planted, filler: self.filler, noise: self.noise },
        };
        let problem = self.problem.unwrap_or(kind.default_problem());
        Ok(GeneratorConfig { family, problem, k })
    }

    /// Short description used in instance ids and reports.
    pub fn describe(&self, k: usize) -> String {
        match self.family {
            Some(FamilyKind::Uniform) => format!("uniform-n{}", self.n),
            Some(FamilyKind::Er) => format!("er-n{}-p{}", self.n, self.p),
            Some(f) => format!("{}-m{}-f{}-x{}", f.name(), self.planted.unwrap_or(k), self.filler, self.noise),
            None => "none".into(),
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct KernelArgs {
    /// Oracle slack for the P3 kernels.
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    /// Exponent for the tournament kernels: a number in (1, 2] or `auto`.
    #[arg(long, default_value = "auto")]
    pub delta: DeltaArg,
    /// Check kernel equivalence with the exact solvers when the instance is small enough.
    #[arg(long)]
    pub verify: bool,
    /// Largest vertex count handed to the exact solvers.
    #[arg(long, env = ORACLE_LIMIT_ENV)]
    pub oracle_limit: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub problem: Problem,
    /// Input path, or the generator description.
    pub source: String,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub delta_auto: bool,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub verify: bool,
    pub oracle_limit: usize,
}

impl RunConfig {
    pub fn new(
        command: &str,
        problem: Problem,
        source: String,
        k: usize,
        seed: u64,
        output: Option<PathBuf>,
        args: &KernelArgs,
    ) -> Result<Self> {
        let tournaments = problem.on_tournaments();
        let (epsilon, delta) = if tournaments {
            let d = match args.delta {
                DeltaArg::Auto => choose_delta(k),
                DeltaArg::Fixed(d) => d,
            };
            if !(d > 1.0 && d <= 2.0) {
                bail!("--delta must lie in (1, 2], got {d}");
            }
            (None, Some(d))
        } else {
            if !(args.epsilon > 0.0 && args.epsilon.is_finite()) {
                bail!("--epsilon must be positive, got {}", args.epsilon);
            }
            (Some(args.epsilon), None)
        };
        let oracle_limit =
            args.oracle_limit.unwrap_or(if tournaments { DEFAULT_TOURNAMENT_LIMIT } else { DEFAULT_GRAPH_LIMIT });
        Ok(Self {
            command: command.into(),
            problem,
            source,
            k,
            epsilon,
            delta,
            delta_auto: tournaments && args.delta == DeltaArg::Auto,
            seed,
            output,
            verify: args.verify,
            oracle_limit,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(delta: DeltaArg, epsilon: f64) -> KernelArgs {
        KernelArgs { epsilon, delta, verify: false, oracle_limit: None }
    }

    #[test]
    fn resolves_and_validates_parameters() {
        let c = RunConfig::new("kernelize", Problem::Fvst, "x".into(), 4, 0, None, &args(DeltaArg::Auto, 1.0)).unwrap();
        assert_eq!(c.delta, Some(choose_delta(4)));
        assert_eq!(c.oracle_limit, DEFAULT_TOURNAMENT_LIMIT);
        assert!(RunConfig::new("k", Problem::Tpt, "x".into(), 4, 0, None, &args(DeltaArg::Fixed(1.0), 1.0)).is_err());
        assert!(RunConfig::new("k", Problem::Tpt, "x".into(), 4, 0, None, &args(DeltaArg::Fixed(2.5), 1.0)).is_err());
        assert!(RunConfig::new("k", Problem::I2pp, "x".into(), 4, 0, None, &args(DeltaArg::Auto, 0.0)).is_err());
        let c = RunConfig::new("k", Problem::I2phs, "x".into(), 4, 0, None, &args(DeltaArg::Auto, 0.5)).unwrap();
        assert_eq!((c.epsilon, c.delta, c.oracle_limit), (Some(0.5), None, DEFAULT_GRAPH_LIMIT));
        assert_eq!("AUTO".parse::<DeltaArg>(), Ok(DeltaArg::Auto));
        assert_eq!("1.5".parse::<DeltaArg>(), Ok(DeltaArg::Fixed(1.5)));
        assert!("x".parse::<DeltaArg>().is_err());
    }
}
