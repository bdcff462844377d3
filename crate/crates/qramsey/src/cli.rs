use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qramsey_core::colorings::{brute_homogeneous, is_homogeneous, Counterexample, HomogeneousGoal};
use qramsey_core::diagforge::{diag_run, verify_defeat, Opponent};
use qramsey_core::disjsel::{brute_force_selection, is_valid_selection, select_two_per_family};
use qramsey_core::ersolver::{er_solve, PositivityOracle};
use qramsey_core::fairness::{
    all_types, classify_type, fairness_audit, forge_partition, matrix_partition, AuditConfig, Candidate, Matrix,
    PartitionBuild, RequirementSpec,
};
use qramsey_core::{DepthBound, QPoint, SimplePartition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{de::DeserializeOwned, Serialize};
use serde_json::{json, Value};

use crate::format::{
    families_from_dto, parse_requirements, CandidateDto, ColoringSpec, FormatError, GameSpec, IntervalDto,
    RequirementDto, StageDto,
};
use crate::instances::{dense_opponents, random_endpoints, random_families, random_point, requirement_suite};
use crate::report::{self, envelope};

#[derive(Debug, Parser, Serialize)]
#[command(name = "qramsey", version, about = "Homogeneous sets, interval selection and fair partitions over the rationals")]
pub struct Cli {
    /// Seed for randomized inputs.
    #[arg(long, global = true, env = "QRAMSEY_SEED")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Find a homogeneous set for a 2-coloring of pairs.
    Solve(SolveArgs),
    /// Pick two disjoint intervals from each family.
    Select(SelectArgs),
    /// Play the diagonalization game against opponents.
    Diag(DiagArgs),
    /// Build a partition against a list of requirements.
    Forge(ForgeArgs),
    /// Re-check a forged partition.
    Audit(AuditArgs),
    /// Cross-check fast routines against brute force.
    Oracle(OracleArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::Select(_) => "select",
            Command::Diag(_) => "diag",
            Command::Forge(_) => "forge",
            Command::Audit(_) => "audit",
            Command::Oracle(_) => "oracle",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    /// counterexample, random, const0, const1, or a JSON file.
    #[arg(long)]
    pub coloring: String,
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
    #[arg(long, default_value_t = 1024, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    /// Points wanted from the first case.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub length: u64,
    /// Cells filled by the second case.
    #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u64).range(1..))]
    pub steps: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct SelectArgs {
    /// Families as a JSON list of lists of intervals.
    #[arg(long = "in", conflicts_with = "n")]
    pub input: Option<PathBuf>,
    /// Generate `n` random families of `4n` cells instead.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=8))]
    pub n: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct DiagArgs {
    /// Game as JSON: level and opponents.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub level: u64,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub horizon: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct ForgeArgs {
    /// Requirements as JSON; the builtin suite when omitted.
    #[arg(long)]
    pub reqs: Option<PathBuf>,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub stages: u64,
    /// Candidate witnesses examined per stage.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct AuditArgs {
    /// Requirements the partition was forged from; the builtin suite when omitted.
    #[arg(long)]
    pub reqs: Option<PathBuf>,
    /// A report written by `forge`.
    #[arg(long)]
    pub build: PathBuf,
    /// Candidate solutions as JSON: `[{"name": .., "points": [..]}]`.
    #[arg(long)]
    pub candidates: Option<PathBuf>,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    pub threshold: u64,
    #[arg(long, default_value_t = 2)]
    pub depth: u32,
    #[arg(long, default_value_t = 1024, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Selection,
    Homogeneous,
    Types,
    Partition,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub check: Check,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{message}")]
    Domain { message: String, report: Option<Value> },
    #[error("budget exhausted: {message}")]
    Budget { message: String, report: Value },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Domain { .. } => 1,
            RunError::Budget { .. } => 2,
            RunError::Parse(_) => 3,
        }
    }

    pub fn report(&self) -> Option<&Value> {
        match self {
            RunError::Parse(_) => None,
            RunError::Domain { report, .. } => report.as_ref(),
            RunError::Budget { report, .. } => Some(report),
        }
    }

    /// Structured diagnostic for stderr.
    pub fn diagnostic(&self) -> Value {
        let kind = match self {
            RunError::Parse(_) => "parse",
            RunError::Domain { .. } => "domain",
            RunError::Budget { .. } => "budget",
        };
        json!({ "error": { "kind": kind, "message": self.to_string(), "exit_code": self.exit_code() } })
    }
}

impl From<FormatError> for RunError {
    fn from(e: FormatError) -> RunError {
        RunError::Parse(e.to_string())
    }
}

fn domain(message: impl ToString) -> RunError {
    RunError::Domain { message: message.to_string(), report: None }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| RunError::Parse(format!("{}: {e}", path.display())))
}

fn need_seed(cli: &Cli) -> Result<u64, RunError> {
    cli.seed.ok_or_else(|| RunError::Parse("a seed is required (--seed or QRAMSEY_SEED)".into()))
}

fn config(cli: &Cli) -> Value {
    let mut v = serde_json::to_value(cli).expect("plain config");
    // The output path does not affect results.
    if let Some(obj) = v.as_object_mut() {
        obj.remove("out");
    }
    v
}

/// Runs the command and returns its report.
pub fn run(cli: &Cli) -> Result<Value, RunError> {
    let cfg = config(cli);
    let name = cli.command.name();
    let ok = |result: Value| Ok(envelope(name, cfg.clone(), "ok", result));
    match &cli.command {
        Command::Solve(a) => {
            let spec = match ColoringSpec::builtin(&a.coloring) {
                Some(s) => s,
                None => read_json(Path::new(&a.coloring))?,
            };
            let f = spec.build(cli.seed, a.budget.min(qramsey_core::colorings::MAX_RANDOM_BUDGET))?;
            let bound = DepthBound::new(a.depth, a.budget).map_err(|e| RunError::Parse(e.to_string()))?;
            let o = PositivityOracle::new(bound);
            match er_solve(&f, &o, a.length as usize, a.steps as usize) {
                Ok(sol) => ok(report::solution_json(&sol)),
                Err(e) => {
                    let message = e.to_string();
                    let status = if e.is_budget() { "budget-exhausted" } else { "failed" };
                    let report = envelope(name, cfg.clone(), status, report::solve_error_json(&e));
                    if e.is_budget() {
                        Err(RunError::Budget { message, report })
                    } else {
                        Err(RunError::Domain { message, report: Some(report) })
                    }
                }
            }
        }
        Command::Select(a) => {
            let families = match (&a.input, a.n) {
                (Some(p), _) => families_from_dto(&read_json::<Vec<Vec<IntervalDto>>>(p)?)?,
                (None, Some(n)) => random_families(&mut ChaCha8Rng::seed_from_u64(need_seed(cli)?), n as usize),
                (None, None) => return Err(RunError::Parse("select needs --in or --n".into())),
            };
            let sel = select_two_per_family(&families).map_err(domain)?;
            ok(report::selection_json(&families, &sel))
        }
        Command::Diag(a) => {
            let (level, opponents): (usize, Vec<Opponent>) = match &a.input {
                Some(p) => {
                    let g: GameSpec = read_json(p)?;
                    let opps = g.opponents.iter().map(|o| o.build()).collect::<Result<_, _>>()?;
                    (g.level, opps)
                }
                None => (a.level as usize, dense_opponents(a.level as usize, need_seed(cli)?)),
            };
            let table = diag_run(level, &opponents, a.horizon).map_err(domain)?;
            let defeats: Vec<_> = (0..opponents.len()).map(|e| verify_defeat(&table, e)).collect();
            ok(report::diag_json(&table, &defeats))
        }
        Command::Forge(a) => {
            let reqs = load_requirements(a.reqs.as_deref())?;
            let build = forge_partition(&reqs, a.stages as usize, a.budget as usize);
            ok(report::forge_json(&build))
        }
        Command::Audit(a) => {
            let reqs = load_requirements(a.reqs.as_deref())?;
            let build = load_build(&a.build, &reqs)?;
            let candidates: Vec<Candidate> = match &a.candidates {
                Some(p) => read_json::<Vec<CandidateDto>>(p)?.iter().map(CandidateDto::parse).collect::<Result<_, _>>()?,
                None => Vec::new(),
            };
            let bound = DepthBound::new(a.depth, a.budget).map_err(|e| RunError::Parse(e.to_string()))?;
            let cfg_audit = AuditConfig { threshold: a.threshold as usize, bound };
            let audit = fairness_audit(&reqs, &build, &candidates, &cfg_audit);
            let result = report::audit_json(&audit);
            if audit.pass {
                ok(result)
            } else {
                Err(RunError::Domain {
                    message: "audit failed".into(),
                    report: Some(envelope(name, cfg.clone(), "failed", result)),
                })
            }
        }
        Command::Oracle(a) => {
            let mut rng = ChaCha8Rng::seed_from_u64(need_seed(cli)?);
            let (violations, examples) = run_oracle(a.check, a.trials, &mut rng);
            let result = json!({ "check": a.check, "trials": a.trials, "violations": violations, "examples": examples });
            if violations == 0 {
                ok(result)
            } else {
                Err(RunError::Domain {
                    message: format!("{violations} violations"),
                    report: Some(envelope(name, cfg.clone(), "violations", result)),
                })
            }
        }
    }
}

fn load_requirements(path: Option<&Path>) -> Result<Vec<RequirementSpec>, RunError> {
    match path {
        Some(p) => Ok(parse_requirements(&read_json::<Vec<RequirementDto>>(p)?)?),
        None => Ok(requirement_suite()),
    }
}

/// Accepts a whole forge report or just its result object.
fn load_build(path: &Path, reqs: &[RequirementSpec]) -> Result<PartitionBuild, RunError> {
    let v: Value = read_json(path)?;
    let log = v.get("result").unwrap_or(&v).get("log").cloned().ok_or_else(|| RunError::Parse("no stage log".into()))?;
    let log: Vec<StageDto> = serde_json::from_value(log).map_err(|e| RunError::Parse(e.to_string()))?;
    let log = log.iter().map(|s| s.parse(reqs)).collect::<Result<Vec<_>, _>>()?;
    PartitionBuild::from_log(log).map_err(domain)
}

/// Longest chain of `pts` (already in the dense order) whose indices move
/// in one direction.
fn longest_monotone(pts: &[QPoint], increasing: bool) -> usize {
    let mut best = vec![1usize; pts.len()];
    for j in 0..pts.len() {
        for i in 0..j {
            if (pts[i].index() < pts[j].index()) == increasing {
                best[j] = best[j].max(best[i] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

fn run_oracle(check: Check, trials: u64, rng: &mut ChaCha8Rng) -> (u64, Vec<Value>) {
    let mut violations = 0;
    let mut examples = Vec::new();
    let mut flag = |ok: bool, example: Value| {
        if !ok {
            violations += 1;
            if examples.len() < 5 {
                examples.push(example);
            }
        }
    };
    for t in 0..trials {
        match check {
            Check::Selection => {
                let n = 1 + (t % 3) as usize;
                let fams = random_families(rng, n);
                let valid = select_two_per_family(&fams).is_ok_and(|s| is_valid_selection(&fams, &s.picks));
                let feasible = brute_force_selection(&fams).is_ok_and(|s| s.is_some());
                flag(valid && feasible, json!({ "trial": t, "n": n }));
            }
            Check::Homogeneous => {
                let size = rng.gen_range(6..=16u64);
                let mut ground: Vec<QPoint> = (0..size).map(QPoint::from_index).collect();
                ground.sort();
                let goal = rng.gen_range(2..=5usize);
                let best = longest_monotone(&ground, true).max(longest_monotone(&ground, false));
                let found = brute_homogeneous(&Counterexample, &ground, HomogeneousGoal::Size(goal)).ok().flatten();
                let ok = match &found {
                    Some((set, c)) => best >= goal && is_homogeneous(&Counterexample, set, *c),
                    None => best < goal,
                };
                flag(ok, json!({ "trial": t, "ground": size, "goal": goal }));
            }
            Check::Types => {
                let (m, n) = (rng.gen_range(0..=3usize), rng.gen_range(0..=3usize));
                let rows: Vec<Vec<QPoint>> = (0..m)
                    .map(|_| {
                        let mut row: Vec<QPoint> = Vec::new();
                        while row.len() < n {
                            let x = random_point(rng, 3);
                            if !row.contains(&x) {
                                row.push(x);
                            }
                        }
                        row.sort();
                        row
                    })
                    .collect();
                let matrix = Matrix::new(rows, n).expect("sorted distinct rows");
                let p = matrix_partition(&matrix);
                let xs: Vec<QPoint> = (0..n).map(|_| random_point(rng, 5)).collect();
                let expected: Vec<_> = if xs.iter().any(|&x| p.is_endpoint(x)) {
                    Vec::new()
                } else {
                    all_types(&matrix)
                        .into_iter()
                        .filter(|ty| ty.parts().iter().zip(&xs).all(|(i, &x)| i.contains(x)))
                        .collect()
                };
                let got: Vec<_> = classify_type(&matrix, &xs).into_iter().collect();
                flag(got == expected, json!({ "trial": t, "rows": m, "cols": n }));
            }
            Check::Partition => {
                let s = random_endpoints(rng, 8, 6);
                let u = random_endpoints(rng, 8, 6);
                let (ps, pu) = (SimplePartition::new(s.clone()), SimplePartition::new(u.clone()));
                let prod = ps.product(&pu);
                let ok = prod == SimplePartition::new(s.into_iter().chain(u)) && prod.refines(&ps) && prod.refines(&pu);
                flag(ok, json!({ "trial": t }));
            }
        }
    }
    (violations, examples)
}

/// A short human-readable rendering of a report.
pub fn render_text(report: &Value) -> String {
    let mut out = String::new();
    for key in ["command", "status"] {
        if let Some(v) = report.get(key).and_then(Value::as_str) {
            out.push_str(&format!("{key}: {v}\n"));
        }
    }
    if let Some(obj) = report.get("result").and_then(Value::as_object) {
        for (k, v) in obj {
            let shown = match v {
                Value::Array(a) => format!("[{} items]", a.len()),
                Value::Object(o) => format!("{{{} fields}}", o.len()),
                other => other.to_string(),
            };
            out.push_str(&format!("{k}: {shown}\n"));
        }
    }
    out
}
