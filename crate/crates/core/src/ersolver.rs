//! The two-case construction of a homogeneous set for a 2-coloring of
//! pairs: an infinite 0-homogeneous set, or a 1-homogeneous set dense in
//! some interval.
//!
//! Which case applies is not decidable, so the solver tries the first case
//! greedily and falls back to the second on the set where it stalled.
//! "Positive" (dense in some interval) is judged by a [`PositivityOracle`]
//! at a fixed depth and index budget.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::colorings::PairColoring;
use crate::qspace::{avoid_members, dense_points, DepthBound, Interval, QPoint, QSpaceError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ErError {
    /// Some `A_n` is positive but has no red-admissible witness in budget.
    CaseIStall(Box<Stall>),
    /// The starting set is not positive at this resolution.
    NotPositive,
    /// No cell avoiding the earlier red neighbourhoods, at `step`.
    AvoidanceFailure { step: usize, set: usize, trace: Vec<TraceStep> },
    /// The avoiding interval holds no member of `A` within budget.
    EmptyCell { step: usize, cell: Interval, trace: Vec<TraceStep> },
    /// Both cases failed.
    Unresolved { stall: Box<Stall>, case2: Box<ErError> },
}

impl ErError {
    /// Whether this is a resource failure rather than a contract violation.
    pub fn is_budget(&self) -> bool {
        !matches!(self, ErError::EmptyCell { .. })
    }
}

impl fmt::Display for ErError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErError::CaseIStall(s) => write!(
                f,
                "case I stalled at step {} with {} points left, dense in {}",
                s.step,
                s.remaining.len(),
                s.witness
            ),
            ErError::NotPositive => f.write_str("starting set is not dense in any cell at this bound"),
            ErError::AvoidanceFailure { step, set, .. } => {
                write!(f, "case II step {step}: set {set} cannot be avoided")
            }
            ErError::EmptyCell { step, cell, .. } => {
                write!(f, "case II step {step}: no candidate in {cell}")
            }
            ErError::Unresolved { stall, case2 } => write!(
                f,
                "unresolved: case I stalled at step {}, case II failed: {case2}",
                stall.step
            ),
        }
    }
}

impl core::error::Error for ErError {}

/// Where the greedy first case got stuck.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stall {
    pub step: usize,
    /// `A_n`, within budget, in index order.
    pub remaining: Vec<QPoint>,
    /// A cell in which `A_n` is dense.
    pub witness: Interval,
    pub trace: Vec<TraceStep>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolutionKind {
    Infinite0,
    Dense1,
}

impl SolutionKind {
    pub fn color(self) -> u8 {
        match self {
            SolutionKind::Infinite0 => 0,
            SolutionKind::Dense1 => 1,
        }
    }
}

/// One chosen point and how it was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub point: QPoint,
    /// Case I: lower-index candidates rejected before this one.
    pub rejected: usize,
    /// Case I: a cell where the next `A_{n+1}` is dense.
    pub dense_in: Option<Interval>,
    /// Case II: the enumerated cell `I_n`.
    pub cell: Option<Interval>,
    /// Case II: the interval `J` that avoids all earlier sets.
    pub avoiding: Option<Interval>,
    /// Case II: number of sets avoided.
    pub avoided: usize,
    /// Size of the working set after the step.
    pub remaining: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub kind: SolutionKind,
    pub points: Vec<QPoint>,
    pub witness: Option<Interval>,
    pub trace: Vec<TraceStep>,
}

/// Finitized "dense in some interval".
///
/// A finite set counts as positive when some dyadic cell `τ` has every
/// extension of `τ` by `depth` bits hit by a member.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PositivityOracle {
    bound: DepthBound,
}

impl PositivityOracle {
    pub fn new(bound: DepthBound) -> PositivityOracle {
        PositivityOracle { bound }
    }

    pub fn bound(&self) -> DepthBound {
        self.bound
    }

    /// Members of `set` with index in budget, in index order.
    pub fn members<F: Fn(QPoint) -> bool>(&self, set: F) -> Vec<QPoint> {
        self.bound.members(set, &Interval::WHOLE)
    }

    /// The first cell, by stem length then left to right, in which `points`
    /// is dense. Only stems whose every extension could fit the budget
    /// are tried.
    pub fn positive_cell(&self, points: &[QPoint]) -> Option<Interval> {
        let d = self.bound.depth();
        let budget = self.bound.budget();
        let mut k = 0u32;
        while k + d < 63 && (1u64 << (k + d)) - 1 <= budget {
            let level = k + d;
            let hits: BTreeSet<u64> = points
                .iter()
                .filter(|x| x.len() as u32 >= level)
                .map(|x| x.prefix(level as usize).numeral())
                .collect();
            let mut runs = hits.iter().peekable();
            // A stem τ is a witness when all 2^d numerals τ·0…0 ..= τ·1…1 are hit.
            let mut best: Option<u64> = None;
            while let Some(&start) = runs.next() {
                if start % (1 << d) != 0 {
                    continue;
                }
                let mut last = start;
                while last - start + 1 < (1 << d) && runs.peek() == Some(&&(last + 1)) {
                    last = *runs.next().unwrap();
                }
                if last - start + 1 == 1 << d {
                    best = Some(start >> d);
                    break;
                }
            }
            if let Some(stem) = best {
                return Some(Interval::cell(QPoint::from_numeral(k as u8, stem)));
            }
            k += 1;
        }
        None
    }

    pub fn is_positive(&self, points: &[QPoint]) -> bool {
        self.positive_cell(points).is_some()
    }

    pub fn dense_in(&self, points: &[QPoint], interval: &Interval) -> bool {
        dense_points(points, interval, self.bound.depth())
    }
}

fn red_part<C: PairColoring + ?Sized>(f: &C, x: QPoint, a: &[QPoint]) -> Vec<QPoint> {
    a.iter().copied().filter(|&y| y != x && f.color(x, y) == Ok(0)).collect()
}

/// Least-index `x ∈ A` with `A ∩ Red(x)` positive, and the cell where it is.
pub fn red_admissible_witness<C, F>(f: &C, a: F, o: &PositivityOracle) -> Option<(QPoint, Interval)>
where
    C: PairColoring + ?Sized,
    F: Fn(QPoint) -> bool,
{
    let members = o.members(a);
    witness_from(f, &members, 0, o).map(|(k, _, cell)| (members[k], cell))
}

/// Scans `a[from..]`; returns the position, the red part and its dense cell.
fn witness_from<C: PairColoring + ?Sized>(
    f: &C,
    a: &[QPoint],
    from: usize,
    o: &PositivityOracle,
) -> Option<(usize, Vec<QPoint>, Interval)> {
    (from..a.len()).find_map(|k| {
        let red = red_part(f, a[k], a);
        o.positive_cell(&red).map(|cell| (k, red, cell))
    })
}

/// Case I from `A_0` = all rationals in budget: `L` greedily chosen points,
/// each the least-index `x ∈ A_n` with `A_n ∩ Red(x)` positive.
pub fn case1_stream<C: PairColoring + ?Sized>(
    f: &C,
    o: &PositivityOracle,
    len: usize,
) -> Result<Solution, ErError> {
    let mut a = o.members(|_| true);
    let mut points = Vec::with_capacity(len);
    let mut trace = Vec::with_capacity(len);
    // A candidate rejected at step n stays rejected later: its red part only
    // shrinks. So the scan resumes after the previous pick.
    let mut last: Option<QPoint> = None;
    while points.len() < len {
        let from = match last {
            Some(x) => a.partition_point(|y| y.index() <= x.index()),
            None => 0,
        };
        match witness_from(f, &a, from, o) {
            Some((k, red, cell)) => {
                let x = a[k];
                points.push(x);
                trace.push(TraceStep {
                    point: x,
                    rejected: k - from,
                    dense_in: Some(cell),
                    cell: None,
                    avoiding: None,
                    avoided: 0,
                    remaining: red.len(),
                });
                a = red;
                last = Some(x);
            }
            None => {
                let witness = o.positive_cell(&a).ok_or(ErError::NotPositive)?;
                return Err(ErError::CaseIStall(Box::new(Stall {
                    step: points.len(),
                    remaining: a,
                    witness,
                    trace,
                })));
            }
        }
    }
    Ok(Solution { kind: SolutionKind::Infinite0, points, witness: None, trace })
}

/// Case II on `A` (in budget, index order) inside `interval`: one point in
/// each of the first `steps` cells of `interval` (breadth first, left to
/// right), each avoiding the red neighbourhoods in `A` of all earlier ones.
pub fn case2_stream<C: PairColoring + ?Sized>(
    f: &C,
    a: &[QPoint],
    interval: &Interval,
    o: &PositivityOracle,
    steps: usize,
) -> Result<Solution, ErError> {
    let mut depth = 0;
    while (1usize << (depth + 1)) - 1 < steps {
        depth += 1;
    }
    let cells = interval.cells_upto(depth);
    let mut points: Vec<QPoint> = Vec::with_capacity(steps);
    let mut trace: Vec<TraceStep> = Vec::with_capacity(steps);
    let mut bad: Vec<Vec<QPoint>> = Vec::with_capacity(steps + 1);
    for (step, (_, cell)) in cells.iter().take(steps).enumerate() {
        // Earlier picks are avoided too, so J holds none of them.
        let mut sets = bad.clone();
        sets.push(points.clone());
        let j = match avoid_members(&sets, Some(a), cell, o.bound().depth()) {
            Ok(j) => j,
            Err(QSpaceError::NoAvoidingInterval { set }) => {
                return Err(ErError::AvoidanceFailure { step, set, trace })
            }
            Err(_) => unreachable!("avoidance only fails by finding no interval"),
        };
        let Some(&x) = a.iter().find(|&&y| j.contains(y)) else {
            return Err(ErError::EmptyCell { step, cell: j, trace });
        };
        bad.push(red_part(f, x, a));
        points.push(x);
        trace.push(TraceStep {
            point: x,
            rejected: 0,
            dense_in: None,
            cell: Some(*cell),
            avoiding: Some(j),
            avoided: sets.len(),
            remaining: a.len(),
        });
    }
    Ok(Solution { kind: SolutionKind::Dense1, points, witness: Some(*interval), trace })
}

/// Case I, then Case II on the stalled set and its dense cell.
pub fn er_solve<C: PairColoring + ?Sized>(
    f: &C,
    o: &PositivityOracle,
    len: usize,
    steps: usize,
) -> Result<Solution, ErError> {
    match case1_stream(f, o, len) {
        Err(ErError::CaseIStall(stall)) => {
            case2_stream(f, &stall.remaining, &stall.witness, o, steps)
                .map_err(|e| ErError::Unresolved { stall, case2: Box::new(e) })
        }
        other => other,
    }
}
