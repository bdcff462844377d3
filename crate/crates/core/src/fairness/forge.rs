use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{all_types, diagonalizes, rows_avoiding_type, valuation_exceeds, MType, MValuation, Matrix};
use crate::ersolver::PositivityOracle;
use crate::qspace::{DepthBound, Interval, QPoint};

/// A set of indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IndexSet {
    All,
    Finite(BTreeSet<u64>),
    Residue { modulus: u64, residue: u64 },
}

impl IndexSet {
    pub fn contains(&self, n: u64) -> bool {
        match self {
            IndexSet::All => true,
            IndexSet::Finite(s) => s.contains(&n),
            IndexSet::Residue { modulus, residue } => *modulus > 0 && n % modulus == *residue,
        }
    }
}

/// A set variable of a valuation: `R_j`, or `S_{i,I}` with `I` the `k`-th
/// member of row `i`'s partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    R(usize),
    S(usize, usize),
}

/// Decidable conditions on valuations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Predicate {
    ConstTrue,
    ConstFalse,
    /// Each listed variable meets the set.
    HitsSet { vars: Vec<Var>, set: IndexSet },
    /// Every `R_j` and every `S_{i,I}` meets the set.
    HitsEveryCell { set: IndexSet },
    /// Holds exactly on the listed valuations.
    CustomTable(Vec<MValuation>),
}

fn meets(block: &BTreeSet<QPoint>, set: &IndexSet) -> bool {
    block.iter().any(|x| set.contains(x.index()))
}

impl Predicate {
    pub fn holds(&self, v: &MValuation) -> bool {
        match self {
            Predicate::ConstTrue => true,
            Predicate::ConstFalse => false,
            Predicate::HitsSet { vars, set } => vars.iter().all(|var| {
                let block = match *var {
                    Var::R(j) => v.r().get(j),
                    Var::S(i, k) => v.s().get(i).and_then(|row| row.get(k)),
                };
                block.is_some_and(|b| meets(b, set))
            }),
            Predicate::HitsEveryCell { set } => {
                v.r().iter().all(|b| meets(b, set)) && v.s().iter().flatten().all(|b| meets(b, set))
            }
            Predicate::CustomTable(table) => table.contains(v),
        }
    }
}

/// A typed valuation offered as evidence that a requirement is essential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub mtype: MType,
    pub valuation: MValuation,
}

/// Candidate witnesses above a threshold `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessEnum {
    /// For windows `w = 1..=max_window` and every type `T`: the pool of
    /// indices `s+1..=s+w`, with `R_j` the pool points in `T_j` and
    /// `S_{i,I}` the pool points in `I`.
    Saturating { max_window: u64 },
    /// Fixed witnesses, tried in order; those not above `s` are skipped.
    Table(Vec<Witness>),
}

impl WitnessEnum {
    fn candidates<'a>(&'a self, m: &'a Matrix, s: u64) -> impl Iterator<Item = Witness> + 'a {
        let types = all_types(m);
        let row_parts: Vec<Vec<Interval>> =
            (0..m.rows()).map(|i| m.row_partition(i).intervals().to_vec()).collect();
        let (max_window, table): (u64, &[Witness]) = match self {
            WitnessEnum::Saturating { max_window } => (*max_window, &[]),
            WitnessEnum::Table(t) => (0, t),
        };
        let saturating = (1..=max_window).flat_map(move |w| {
            let pool: Vec<QPoint> = (s + 1..=s + w).map(QPoint::from_index).collect();
            let row_parts = row_parts.clone();
            types.clone().into_iter().map(move |t| {
                let r = t
                    .parts()
                    .iter()
                    .map(|p| pool.iter().copied().filter(|&x| p.contains(x)).collect())
                    .collect();
                let blocks = row_parts
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|i| pool.iter().copied().filter(|&x| i.contains(x)).collect())
                            .collect()
                    })
                    .collect();
                Witness { mtype: t, valuation: MValuation::new(m, r, blocks).expect("built within the partition") }
            })
        });
        let fixed = table
            .iter()
            .filter(move |w| valuation_exceeds(&w.valuation, s) && w.valuation.is_of_type(&w.mtype))
            .cloned();
        saturating.chain(fixed)
    }
}

/// A matrix, a predicate on its valuations and a source of witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RequirementSpec {
    pub matrix: Matrix,
    pub predicate: Predicate,
    pub witnesses: WitnessEnum,
}

/// The first enumerated witness above `s` satisfying the predicate, among
/// at most `budget` candidates.
pub fn essential_search(req: &RequirementSpec, s: u64, budget: usize) -> Option<Witness> {
    req.witnesses
        .candidates(&req.matrix, s)
        .take(budget)
        .find(|w| req.predicate.holds(&w.valuation))
}

/// One stage of the construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRecord {
    pub stage: usize,
    /// `None` once the requirement list is exhausted.
    pub requirement: Option<usize>,
    pub bound_before: u64,
    pub bound_after: u64,
    pub witness: Option<Witness>,
    /// The row intervals `J_i` avoiding the witness type.
    pub rows: Vec<Interval>,
    pub added0: Vec<u64>,
    pub added1: Vec<u64>,
}

/// The finite partition of `[0, bound]` reached after all stages, with the
/// stage log it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionBuild {
    a0: BTreeSet<u64>,
    a1: BTreeSet<u64>,
    bound: u64,
    log: Vec<StageRecord>,
}

impl PartitionBuild {
    /// `A₀ = {0}`, `A₁ = ∅`, bound 0.
    fn start() -> PartitionBuild {
        PartitionBuild { a0: [0].into(), a1: BTreeSet::new(), bound: 0, log: Vec::new() }
    }

    /// Rebuilds the sets by replaying a stage log.
    pub fn from_log(log: Vec<StageRecord>) -> Result<PartitionBuild, InvariantViolation> {
        let mut build = PartitionBuild::start();
        for (k, r) in log.iter().enumerate() {
            if r.stage != k {
                return Err(InvariantViolation { stage: k, what: "stage numbering" });
            }
            apply(&mut build.a0, &mut build.a1, &mut build.bound, r)?;
        }
        build.log = log;
        Ok(build)
    }

    pub fn a0(&self) -> &BTreeSet<u64> {
        &self.a0
    }

    pub fn a1(&self) -> &BTreeSet<u64> {
        &self.a1
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn log(&self) -> &[StageRecord] {
        &self.log
    }

    /// The side of index `x` in the final sets, if decided.
    pub fn side(&self, x: u64) -> Option<u8> {
        if self.a0.contains(&x) {
            Some(0)
        } else if self.a1.contains(&x) {
            Some(1)
        } else {
            None
        }
    }

    /// The stage approximation `h(x, s)`: 1 if `x ∈ A_{1,s}`, else 0.
    pub fn approx(&self, x: u64, stage: usize) -> u8 {
        let in_a1 = self.log.iter().take(stage).any(|r| r.added1.contains(&x));
        u8::from(in_a1)
    }
}

/// Runs `stages` stages; stage `s` serves requirement `s` and stages past
/// the end of the list act as if no witness were found.
pub fn forge_partition(reqs: &[RequirementSpec], stages: usize, budget: usize) -> PartitionBuild {
    let mut build = PartitionBuild::start();
    for stage in 0..stages {
        let b = build.bound;
        let found = reqs.get(stage).and_then(|r| essential_search(r, b, budget).map(|w| (r, w)));
        let record = match found {
            Some((req, w)) => {
                let d = w.valuation.max_index().unwrap_or(0).max(b + 1);
                let rows = rows_avoiding_type(&req.matrix, &w.mtype);
                let (added0, added1): (Vec<u64>, Vec<u64>) = (b + 1..=d)
                    .partition(|&x| rows.iter().any(|j| j.contains(QPoint::from_index(x))));
                StageRecord {
                    stage,
                    requirement: Some(stage),
                    bound_before: b,
                    bound_after: d,
                    witness: Some(w),
                    rows,
                    added0,
                    added1,
                }
            }
            None => StageRecord {
                stage,
                requirement: (stage < reqs.len()).then_some(stage),
                bound_before: b,
                bound_after: b + 1,
                witness: None,
                rows: Vec::new(),
                added0: alloc::vec![b + 1],
                added1: Vec::new(),
            },
        };
        if let Err(v) = apply(&mut build.a0, &mut build.a1, &mut build.bound, &record) {
            panic!("stage invariant broken: {v}");
        }
        build.log.push(record);
    }
    build
}

/// A failed stage invariant found on replay.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantViolation {
    pub stage: usize,
    pub what: &'static str,
}

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {}: {}", self.stage, self.what)
    }
}

fn apply(
    a0: &mut BTreeSet<u64>,
    a1: &mut BTreeSet<u64>,
    bound: &mut u64,
    r: &StageRecord,
) -> Result<(), InvariantViolation> {
    let fail = |what| Err(InvariantViolation { stage: r.stage, what });
    if r.bound_before != *bound {
        return fail("recorded bound does not match replay");
    }
    if r.added0.iter().chain(&r.added1).any(|&x| x <= *bound) {
        return fail("new element not above the previous maximum");
    }
    let fresh: BTreeSet<u64> = r.added0.iter().chain(&r.added1).copied().collect();
    if fresh.len() != r.added0.len() + r.added1.len() {
        return fail("element added to both sides");
    }
    if fresh != (*bound + 1..=r.bound_after).collect() {
        return fail("additions do not cover the new range");
    }
    a0.extend(&r.added0);
    a1.extend(&r.added1);
    *bound = r.bound_after;
    if *bound < (r.stage + 1) as u64 {
        return fail("bound fell behind the stage count");
    }
    Ok(())
}

/// Replays the log from the start, checking disjointness, coverage of
/// `[0, b]` with `b ≥ s`, and growth by fresh elements only.
pub fn check_build(build: &PartitionBuild) -> Result<(), InvariantViolation> {
    let replay = PartitionBuild::from_log(build.log.clone())?;
    if replay.a0 != build.a0 || replay.a1 != build.a1 || replay.bound != build.bound {
        return Err(InvariantViolation { stage: build.log.len(), what: "final sets differ from replay" });
    }
    Ok(())
}

/// A finite set offered as a solution to the partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub name: String,
    pub points: Vec<QPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuditConfig {
    /// A candidate inside `A₀` with at least this many points is flagged.
    pub threshold: usize,
    /// Resolution for flagging candidates dense inside `A₁`.
    pub bound: DepthBound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessChecks {
    pub predicate_holds: bool,
    pub of_type: bool,
    pub above_bound: bool,
    pub diagonalizes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RequirementAudit {
    pub requirement: usize,
    /// `None` when no witness was found (satisfied vacuously).
    pub checks: Option<WitnessChecks>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateAudit {
    pub name: String,
    pub size: usize,
    /// A point in `A₁`: the 0-by-1 probe `R₀ = {x}` diagonalizes.
    pub meets_a1: Option<QPoint>,
    /// A point in `A₀`: the 1-by-0 probe `S_{0,ℚ} = {x}` diagonalizes.
    pub meets_a0: Option<QPoint>,
    /// Points beyond the construction's bound.
    pub undecided: usize,
    pub inside_a0: bool,
    pub inside_a1: bool,
    pub dense_cell: Option<Interval>,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub requirements: Vec<RequirementAudit>,
    pub invariants: Result<(), InvariantViolation>,
    pub candidates: Vec<CandidateAudit>,
    pub pass: bool,
}

/// Re-checks every acting requirement against the final partition, replays
/// the stage invariants, and flags candidates that would solve the
/// partition at this resolution.
pub fn fairness_audit(
    reqs: &[RequirementSpec],
    build: &PartitionBuild,
    candidates: &[Candidate],
    cfg: &AuditConfig,
) -> AuditReport {
    let requirements: Vec<RequirementAudit> = build
        .log
        .iter()
        .filter_map(|r| r.requirement.map(|k| (k, r)))
        .map(|(k, r)| {
            let checks = r.witness.as_ref().map(|w| {
                let m = &reqs[k].matrix;
                WitnessChecks {
                    predicate_holds: reqs[k].predicate.holds(&w.valuation),
                    of_type: w.valuation.is_of_type(&w.mtype),
                    above_bound: valuation_exceeds(&w.valuation, r.bound_before),
                    diagonalizes: diagonalizes(&w.valuation, m, &build.a0, &build.a1),
                }
            });
            let pass = checks
                .as_ref()
                .is_none_or(|c| c.predicate_holds && c.of_type && c.above_bound && c.diagonalizes);
            RequirementAudit { requirement: k, checks, pass }
        })
        .collect();
    let oracle = PositivityOracle::new(cfg.bound);
    let candidates: Vec<CandidateAudit> = candidates
        .iter()
        .map(|c| {
            let side = |x: &QPoint| build.side(x.index());
            let undecided = c.points.iter().filter(|x| side(x).is_none()).count();
            let inside_a0 = undecided == 0 && c.points.iter().all(|x| side(x) == Some(0));
            let inside_a1 = undecided == 0 && c.points.iter().all(|x| side(x) == Some(1));
            let dense_cell = oracle.positive_cell(&c.points);
            let flagged = (inside_a0 && c.points.len() >= cfg.threshold) || (inside_a1 && dense_cell.is_some());
            CandidateAudit {
                name: c.name.clone(),
                size: c.points.len(),
                meets_a1: c.points.iter().copied().find(|x| side(x) == Some(1)),
                meets_a0: c.points.iter().copied().find(|x| side(x) == Some(0)),
                undecided,
                inside_a0,
                inside_a1,
                dense_cell,
                flagged,
            }
        })
        .collect();
    let invariants = check_build(build);
    let pass = invariants.is_ok()
        && requirements.iter().all(|r| r.pass)
        && candidates.iter().all(|c| !c.flagged);
    AuditReport { requirements, invariants, candidates, pass }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fairness::classify_type;

    fn p(s: &str) -> QPoint {
        s.parse().unwrap()
    }

    fn req(matrix: Matrix, predicate: Predicate) -> RequirementSpec {
        RequirementSpec { matrix, predicate, witnesses: WitnessEnum::Saturating { max_window: 8 } }
    }

    #[test]
    fn const_true_takes_first_witness() {
        let r = req(Matrix::degenerate(0, 1), Predicate::ConstTrue);
        let w = essential_search(&r, 5, 100).unwrap();
        assert!(valuation_exceeds(&w.valuation, 5));
        assert_eq!(w.valuation.r()[0], [QPoint::from_index(6)].into());
    }

    #[test]
    fn const_false_never_found() {
        let r = req(Matrix::degenerate(0, 1), Predicate::ConstFalse);
        assert_eq!(essential_search(&r, 0, 10_000), None);
    }

    #[test]
    fn even_hits_found_above_any_threshold() {
        let even = IndexSet::Residue { modulus: 2, residue: 0 };
        let r = req(Matrix::degenerate(0, 1), Predicate::HitsSet { vars: alloc::vec![Var::R(0)], set: even });
        for s in [0, 7, 100, 1001] {
            let w = essential_search(&r, s, 100).unwrap();
            assert!(w.valuation.r()[0].iter().any(|x| x.index() % 2 == 0 && x.index() > s));
        }
    }

    #[test]
    fn nonempty_column_goes_to_a1() {
        let r = req(Matrix::degenerate(0, 1), Predicate::HitsSet { vars: alloc::vec![Var::R(0)], set: IndexSet::All });
        let build = forge_partition(&[r.clone()], 1, 100);
        let rec = &build.log()[0];
        let w = rec.witness.as_ref().unwrap();
        assert!(w.valuation.points().all(|x| build.a1().contains(&x.index())));
        assert!(rec.added0.is_empty());
        assert!(diagonalizes(&w.valuation, &r.matrix, build.a0(), build.a1()));
    }

    #[test]
    fn const_false_extends_a0() {
        let r = req(Matrix::degenerate(0, 1), Predicate::ConstFalse);
        let build = forge_partition(&[r.clone(), r.clone(), r], 5, 100);
        assert_eq!(build.bound(), 5);
        assert_eq!(build.a0(), &(0..=5).collect());
        assert!(build.a1().is_empty());
        assert!(check_build(&build).is_ok());
    }

    #[test]
    fn two_one_by_one_requirements_pass_audit() {
        let half = QPoint::ROOT;
        let m = Matrix::new(alloc::vec![alloc::vec![half]], 1).unwrap();
        let reqs = [
            req(m.clone(), Predicate::HitsSet { vars: alloc::vec![Var::R(0), Var::S(0, 0)], set: IndexSet::All }),
            req(m, Predicate::HitsEveryCell { set: IndexSet::All }),
        ];
        let build = forge_partition(&reqs, 4, 1000);
        let cfg = AuditConfig { threshold: 3, bound: DepthBound::new(2, 64).unwrap() };
        let report = fairness_audit(&reqs, &build, &[], &cfg);
        assert!(report.pass, "{report:?}");
        assert!(report.requirements.iter().all(|r| r.checks.is_some()));
    }

    #[test]
    fn candidates_inside_a0_are_flagged() {
        let r = req(Matrix::degenerate(0, 1), Predicate::ConstFalse);
        let build = forge_partition(&[r], 10, 10);
        let cfg = AuditConfig { threshold: 3, bound: DepthBound::new(1, 64).unwrap() };
        let small = Candidate { name: "small".into(), points: (1..3).map(QPoint::from_index).collect() };
        let big = Candidate { name: "big".into(), points: (1..6).map(QPoint::from_index).collect() };
        let report = fairness_audit(&[], &build, &[small, big], &cfg);
        assert!(!report.candidates[0].flagged);
        assert!(report.candidates[1].flagged);
        assert!(!report.pass);
    }

    #[test]
    fn tampered_log_fails_replay() {
        let r = req(Matrix::degenerate(0, 1), Predicate::ConstTrue);
        let mut build = forge_partition(&[r.clone(), r], 2, 10);
        build.log[1].added1.push(0);
        assert!(check_build(&build).is_err());
    }

    #[test]
    fn witness_types_classify_their_points() {
        let m = Matrix::new(alloc::vec![alloc::vec![p("0"), p("1")]], 2).unwrap();
        let r = req(m.clone(), Predicate::HitsSet { vars: alloc::vec![Var::R(0), Var::R(1)], set: IndexSet::All });
        let w = essential_search(&r, 3, 1000).unwrap();
        let xs: Vec<QPoint> = w.valuation.r().iter().map(|s| *s.iter().next().unwrap()).collect();
        assert_eq!(classify_type(&m, &xs).unwrap(), w.mtype);
    }
}
