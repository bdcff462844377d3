//! A finite-horizon game building a level coloring `d(n, ·)` that defeats
//! enumerations of candidate dense homogeneous sets.
//!
//! At level `n` up to `n` opponents emit rationals. Once opponent `e` has
//! emitted `4n + 1` points its gaps become a family `Γ_e`; the selection of
//! [`crate::disjsel`] is rerun over all families seen so far and each
//! opponent is handed two disjoint intervals, colored 0 and 1. Every later
//! point of the opponent inside them then gets the color of its interval,
//! so its output cannot stay homogeneous.

use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::colorings::{limit_coloring, ColoringError, LevelColoring, LimitApprox, LimitColoring};
use crate::disjsel::{gaps_of_points, select_at_level, DisjselError, IntervalFamily, Selection};
use crate::qspace::{Interval, QPoint};

/// Longest strings a dense walk emits.
pub const WALK_MAX_LEN: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagError {
    TooManyOpponents { opponents: usize, level: usize },
    ZeroLevel,
    RepeatedPoint { point: QPoint },
    NeverActed { opponent: usize },
    UnknownOpponent { opponent: usize },
    Selection(DisjselError),
}

impl fmt::Display for DiagError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagError::TooManyOpponents { opponents, level } => {
                write!(f, "{opponents} opponents at level {level}")
            }
            DiagError::ZeroLevel => f.write_str("level must be at least 1"),
            DiagError::RepeatedPoint { point } => write!(f, "script repeats point {point:?}"),
            DiagError::NeverActed { opponent } => {
                write!(f, "opponent {opponent} never reached its threshold")
            }
            DiagError::UnknownOpponent { opponent } => write!(f, "no opponent {opponent}"),
            DiagError::Selection(e) => write!(f, "selection failed: {e}"),
        }
    }
}

impl core::error::Error for DiagError {}

/// A deterministic stream of distinct rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Opponent {
    Script(Vec<QPoint>),
    /// Every string of length 0, then every string of length 1, and so on,
    /// each length shuffled by a seeded generator.
    DenseWalk { seed: u64 },
}

impl Opponent {
    pub fn script(points: Vec<QPoint>) -> Result<Opponent, DiagError> {
        let mut seen = alloc::collections::BTreeSet::new();
        for &x in &points {
            if !seen.insert(x) {
                return Err(DiagError::RepeatedPoint { point: x });
            }
        }
        Ok(Opponent::Script(points))
    }

    pub fn stream(&self) -> OpponentStream {
        match self {
            Opponent::Script(points) => OpponentStream::Script { points: points.clone(), pos: 0 },
            Opponent::DenseWalk { seed } => OpponentStream::Walk {
                rng: ChaCha8Rng::seed_from_u64(*seed),
                len: 0,
                pending: Vec::new(),
            },
        }
    }
}

pub enum OpponentStream {
    Script { points: Vec<QPoint>, pos: usize },
    Walk { rng: ChaCha8Rng, len: usize, pending: Vec<QPoint> },
}

impl Iterator for OpponentStream {
    type Item = QPoint;

    fn next(&mut self) -> Option<QPoint> {
        match self {
            OpponentStream::Script { points, pos } => {
                let x = points.get(*pos).copied();
                *pos += 1;
                x
            }
            OpponentStream::Walk { rng, len, pending } => {
                if pending.is_empty() {
                    if *len > WALK_MAX_LEN {
                        return None;
                    }
                    let mut level: Vec<QPoint> =
                        (0..1u64 << *len).map(|k| QPoint::from_numeral(*len as u8, k)).collect();
                    level.shuffle(rng);
                    level.reverse();
                    *pending = level;
                    *len += 1;
                }
                pending.pop()
            }
        }
    }
}

/// The interval pairs in force from `stage` on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub stage: u64,
    /// The opponent whose threshold triggered this assignment.
    pub trigger: usize,
    /// `(I_{e,0}, I_{e,1})` per opponent, `None` before it acts.
    pub pairs: Vec<Option<(Interval, Interval)>>,
    pub selection: Selection,
}

/// The outcome of one game at a fixed level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagTable {
    level: usize,
    default_color: u8,
    horizon: u64,
    /// Per opponent, `(stage, point)` for every emission.
    emissions: Vec<Vec<(u64, QPoint)>>,
    families: Vec<Option<IntervalFamily>>,
    assignments: Vec<Assignment>,
}

impl DiagTable {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn default_color(&self) -> u8 {
        self.default_color
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn opponents(&self) -> usize {
        self.emissions.len()
    }

    pub fn emissions(&self, e: usize) -> &[(u64, QPoint)] {
        &self.emissions[e]
    }

    pub fn family(&self, e: usize) -> Option<&IntervalFamily> {
        self.families[e].as_ref()
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    /// The assignment in force at `stage`.
    pub fn assignment_at(&self, stage: u64) -> Option<&Assignment> {
        let k = self.assignments.partition_point(|a| a.stage <= stage);
        k.checked_sub(1).map(|k| &self.assignments[k])
    }

    /// The color `x` receives under the assignment in force at `stage`.
    pub fn color_at(&self, x: QPoint, stage: u64) -> u8 {
        self.assignment_at(stage)
            .and_then(|a| {
                a.pairs.iter().flatten().find_map(|(i0, i1)| {
                    if i0.contains(x) {
                        Some(0)
                    } else if i1.contains(x) {
                        Some(1)
                    } else {
                        None
                    }
                })
            })
            .unwrap_or(self.default_color)
    }

    /// `d(n, x)`: the point is read at the stage equal to its index.
    pub fn color(&self, x: QPoint) -> u8 {
        self.color_at(x, x.index())
    }

    /// Stages at which the pair of opponent `e` was set or changed.
    pub fn reassignments(&self, e: usize) -> Vec<u64> {
        let mut out = Vec::new();
        let mut current = None;
        for a in &self.assignments {
            let pair = a.pairs.get(e).copied().flatten();
            if pair.is_some() && pair != current {
                out.push(a.stage);
                current = pair;
            }
        }
        out
    }

    pub fn final_pair(&self, e: usize) -> Option<(Interval, Interval)> {
        self.assignments.last().and_then(|a| a.pairs.get(e).copied().flatten())
    }
}

/// Plays the game at level `n` for `horizon` round-robin steps.
pub fn diag_run(level: usize, opponents: &[Opponent], horizon: u64) -> Result<DiagTable, DiagError> {
    if level == 0 {
        return Err(DiagError::ZeroLevel);
    }
    if opponents.len() > level {
        return Err(DiagError::TooManyOpponents { opponents: opponents.len(), level });
    }
    let k = opponents.len();
    let threshold = 4 * level + 1;
    let mut streams: Vec<OpponentStream> = opponents.iter().map(Opponent::stream).collect();
    let mut table = DiagTable {
        level,
        default_color: 0,
        horizon,
        emissions: alloc::vec![Vec::new(); k],
        families: alloc::vec![None; k],
        assignments: Vec::new(),
    };
    if k == 0 {
        return Ok(table);
    }
    for t in 0..horizon {
        let e = (t % k as u64) as usize;
        let Some(x) = streams[e].next() else {
            continue;
        };
        let stage = t + 1;
        table.emissions[e].push((stage, x));
        if table.emissions[e].len() != threshold {
            continue;
        }
        let pts: Vec<QPoint> = table.emissions[e].iter().map(|&(_, p)| p).collect();
        table.families[e] = Some(gaps_of_points(&pts).map_err(DiagError::Selection)?);
        let acting: Vec<usize> = (0..k).filter(|&j| table.families[j].is_some()).collect();
        let fams: Vec<IntervalFamily> =
            acting.iter().map(|&j| table.families[j].clone().expect("acting")).collect();
        let selection = select_at_level(&fams, level).map_err(DiagError::Selection)?;
        let mut pairs = alloc::vec![None; k];
        for (pos, &j) in acting.iter().enumerate() {
            pairs[j] = selection.pair(pos);
        }
        table.assignments.push(Assignment { stage, trigger: e, pairs, selection });
    }
    Ok(table)
}

/// Levels `1, 2, …` of `d`, one table each; missing levels use color 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiagFamily {
    tables: Vec<DiagTable>,
}

impl DiagFamily {
    pub fn new(mut tables: Vec<DiagTable>) -> DiagFamily {
        tables.sort_by_key(|t| t.level);
        DiagFamily { tables }
    }

    pub fn table(&self, level: usize) -> Option<&DiagTable> {
        self.tables.iter().find(|t| t.level == level)
    }

    pub fn tables(&self) -> &[DiagTable] {
        &self.tables
    }
}

impl LevelColoring for DiagFamily {
    fn level_color(&self, level: u64, x: QPoint) -> u8 {
        usize::try_from(level)
            .ok()
            .and_then(|l| self.table(l))
            .map_or(0, |t| t.color(x))
    }
}

impl LevelColoring for DiagTable {
    fn level_color(&self, level: u64, x: QPoint) -> u8 {
        if level == self.level as u64 {
            self.color(x)
        } else {
            0
        }
    }
}

/// `x ↦ ⟨d(h(y, i(x)), x) : y < a⟩`.
pub fn diag2_coloring<'a>(
    approx: &'a LimitApprox,
    tables: &'a DiagFamily,
) -> Result<LimitColoring<'a, &'a DiagFamily>, ColoringError> {
    limit_coloring(approx, tables)
}

/// What the final assignment did to one opponent's later points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefeatReport {
    pub opponent: usize,
    pub pair: (Interval, Interval),
    /// Stage of the last change to the opponent's pair.
    pub stable_from: u64,
    pub reassignments: usize,
    /// Opponent points emitted and indexed at or after `stable_from`, per
    /// interval.
    pub counts: [usize; 2],
    /// First such point in each interval.
    pub samples: [Option<QPoint>; 2],
    /// Every counted point got the color of its interval.
    pub colors_ok: bool,
    /// Points of both colors were seen.
    pub defeated: bool,
}

pub fn verify_defeat(table: &DiagTable, e: usize) -> Result<DefeatReport, DiagError> {
    if e >= table.opponents() {
        return Err(DiagError::UnknownOpponent { opponent: e });
    }
    let changes = table.reassignments(e);
    let (Some(&stable_from), Some(pair)) = (changes.last(), table.final_pair(e)) else {
        return Err(DiagError::NeverActed { opponent: e });
    };
    let mut counts = [0usize; 2];
    let mut samples = [None; 2];
    let mut colors_ok = true;
    for &(stage, x) in &table.emissions[e] {
        if stage < stable_from || x.index() < stable_from {
            continue;
        }
        let side = if pair.0.contains(x) {
            0
        } else if pair.1.contains(x) {
            1
        } else {
            continue;
        };
        counts[side] += 1;
        samples[side].get_or_insert(x);
        colors_ok &= table.color(x) == side as u8;
    }
    Ok(DefeatReport {
        opponent: e,
        pair,
        stable_from,
        reassignments: changes.len(),
        counts,
        samples,
        colors_ok,
        defeated: colors_ok && counts[0] > 0 && counts[1] > 0,
    })
}
