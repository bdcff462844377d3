//! Choosing two intervals from each of `n` families of `4n` pairwise
//! disjoint intervals so that all `2n` choices are pairwise disjoint.
//!
//! The greedy picks an inclusion-minimal live interval at every stage. A
//! minimal interval meets at most two members of any other family (a third
//! would sit strictly inside it), so each pick costs every other family at
//! most two intervals and `4n` members always suffice.

use alloc::vec::Vec;
use core::fmt;

use crate::qspace::{Interval, QPoint};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DisjselError {
    MalformedFamily { family: usize, defect: FamilyDefect },
    TooManyFamilies { families: usize, level: usize },
    NoFamilies,
    /// Expected `4n + 1` distinct points.
    WrongCardinality { got: usize, distinct: usize },
    TooLarge { families: usize, max: usize },
    /// The greedy ran out of live intervals at `stage`.
    Stalled { stage: usize },
}

impl fmt::Display for DisjselError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DisjselError::MalformedFamily { family, defect } => match defect {
                FamilyDefect::Overlap { a, b } => {
                    write!(f, "family {family}: members {a} and {b} overlap")
                }
                FamilyDefect::Cardinality { expected, got } => {
                    write!(f, "family {family} has {got} members, expected {expected}")
                }
            },
            DisjselError::TooManyFamilies { families, level } => {
                write!(f, "{families} families exceed level {level}")
            }
            DisjselError::NoFamilies => f.write_str("no families given"),
            DisjselError::WrongCardinality { got, distinct } => write!(
                f,
                "expected 4n+1 distinct points (n ≥ 1), got {got} with {distinct} distinct"
            ),
            DisjselError::TooLarge { families, max } => {
                write!(f, "brute force limited to {max} families, got {families}")
            }
            DisjselError::Stalled { stage } => write!(f, "no live interval left at stage {stage}"),
        }
    }
}

impl core::error::Error for DisjselError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyDefect {
    Overlap { a: usize, b: usize },
    Cardinality { expected: usize, got: usize },
}

/// Pairwise disjoint intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalFamily {
    members: Vec<Interval>,
}

impl IntervalFamily {
    /// `family` is the index reported on overlap.
    pub fn new(members: Vec<Interval>, family: usize) -> Result<IntervalFamily, DisjselError> {
        for a in 0..members.len() {
            for b in a + 1..members.len() {
                if !members[a].is_disjoint(&members[b]) {
                    return Err(DisjselError::MalformedFamily { family, defect: FamilyDefect::Overlap { a, b } });
                }
            }
        }
        Ok(IntervalFamily { members })
    }

    pub fn members(&self) -> &[Interval] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// One chosen interval and the family it came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pick {
    pub family: usize,
    pub interval: Interval,
}

/// What happened at one greedy stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRecord {
    /// Number of picks after this stage.
    pub stage: usize,
    pub pick: Pick,
    /// Live intervals per family before the pick.
    pub live_before: Vec<usize>,
    /// Intervals dropped from each family because they met the pick; for the
    /// picking family this counts the pick itself or the emptied remainder.
    pub removed: Vec<usize>,
    pub live_after: Vec<usize>,
    /// Picks per family after this stage.
    pub chosen: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    pub picks: Vec<Pick>,
    pub trace: Vec<StageRecord>,
}

impl Selection {
    /// The two picks of `family`, left one first.
    pub fn pair(&self, family: usize) -> Option<(Interval, Interval)> {
        let mut mine = self.picks.iter().filter(|p| p.family == family).map(|p| p.interval);
        let (a, b) = (mine.next()?, mine.next()?);
        Some(if a.lo() < b.lo() { (a, b) } else { (b, a) })
    }
}

/// Picks two intervals per family, `n = families.len()`, each family having
/// exactly `4n` members.
pub fn select_two_per_family(families: &[IntervalFamily]) -> Result<Selection, DisjselError> {
    select_at_level(families, families.len())
}

/// As [`select_two_per_family`] for at most `level` families of exactly
/// `4 * level` members each.
pub fn select_at_level(families: &[IntervalFamily], level: usize) -> Result<Selection, DisjselError> {
    if families.is_empty() {
        return Err(DisjselError::NoFamilies);
    }
    if families.len() > level {
        return Err(DisjselError::TooManyFamilies { families: families.len(), level });
    }
    for (e, fam) in families.iter().enumerate() {
        if fam.len() != 4 * level {
            let defect = FamilyDefect::Cardinality { expected: 4 * level, got: fam.len() };
            return Err(DisjselError::MalformedFamily { family: e, defect });
        }
    }

    let k = families.len();
    let mut live: Vec<Vec<Interval>> = families.iter().map(|f| f.members.clone()).collect();
    let mut chosen = alloc::vec![0usize; k];
    let mut picks: Vec<Pick> = Vec::with_capacity(2 * k);
    let mut trace = Vec::with_capacity(2 * k);

    while picks.len() < 2 * k {
        let stage = picks.len();
        let pick = minimal_live(&live).ok_or(DisjselError::Stalled { stage })?;
        let live_before: Vec<usize> = live.iter().map(Vec::len).collect();
        let e = pick.family;
        if chosen[e] == 1 {
            live[e].clear();
        } else {
            live[e].retain(|i| *i != pick.interval);
        }
        chosen[e] += 1;
        for (j, fam) in live.iter_mut().enumerate() {
            if j != e {
                fam.retain(|i| i.is_disjoint(&pick.interval));
            }
        }
        picks.push(pick);
        let live_after: Vec<usize> = live.iter().map(Vec::len).collect();
        let removed: Vec<usize> = live_before.iter().zip(&live_after).map(|(b, a)| b - a).collect();
        let record = StageRecord {
            stage: stage + 1,
            pick,
            live_before,
            removed,
            live_after,
            chosen: chosen.clone(),
        };
        assert!(stage_invariants_hold(&record, level), "stage invariant broken: {record:?}");
        debug_assert!(picks.iter().all(|p| live.iter().flatten().all(|i| i.is_disjoint(&p.interval))));
        trace.push(record);
    }
    Ok(Selection { picks, trace })
}

/// The stage bounds: at most two picks per family, at most two intervals
/// lost per other family, and `4·level − 2s` survivors in every family
/// that still needs picks.
pub fn stage_invariants_hold(record: &StageRecord, level: usize) -> bool {
    let s = record.stage;
    let e = record.pick.family;
    record.chosen.iter().all(|&c| c <= 2)
        && record.removed.iter().enumerate().all(|(j, &r)| j == e || r <= 2)
        && record
            .chosen
            .iter()
            .zip(&record.live_after)
            .all(|(&c, &l)| c >= 2 || l + 2 * s >= 4 * level)
}

/// Inclusion-minimal live interval; ties by family, then left endpoint,
/// then right endpoint.
fn minimal_live(live: &[Vec<Interval>]) -> Option<Pick> {
    let all = || live.iter().enumerate().flat_map(|(e, f)| f.iter().map(move |i| (e, *i)));
    all()
        .filter(|(_, i)| !all().any(|(_, j)| j != *i && i.contains_interval(&j)))
        .min_by_key(|(e, i)| (*e, i.lo(), i.hi()))
        .map(|(family, interval)| Pick { family, interval })
}

/// The `4n` consecutive open gaps between `4n + 1` distinct points.
pub fn gaps_of_points(points: &[QPoint]) -> Result<IntervalFamily, DisjselError> {
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != points.len() || points.len() < 5 || points.len() % 4 != 1 {
        return Err(DisjselError::WrongCardinality { got: points.len(), distinct: sorted.len() });
    }
    let members = sorted
        .windows(2)
        .map(|w| Interval::between(w[0], w[1]).expect("distinct sorted points"))
        .collect();
    Ok(IntervalFamily { members })
}

/// Largest number of families [`brute_force_selection`] accepts.
pub const MAX_BRUTE_FAMILIES: usize = 3;

/// Exhaustive search for any valid two-per-family disjoint selection.
pub fn brute_force_selection(families: &[IntervalFamily]) -> Result<Option<Vec<Pick>>, DisjselError> {
    if families.len() > MAX_BRUTE_FAMILIES {
        return Err(DisjselError::TooLarge { families: families.len(), max: MAX_BRUTE_FAMILIES });
    }
    let mut picks = Vec::new();
    Ok(brute_from(families, 0, &mut picks).then_some(picks))
}

fn brute_from(families: &[IntervalFamily], e: usize, picks: &mut Vec<Pick>) -> bool {
    let Some(fam) = families.get(e) else {
        return true;
    };
    let free = |i: &Interval, picks: &[Pick]| picks.iter().all(|p| p.interval.is_disjoint(i));
    for a in 0..fam.len() {
        if !free(&fam.members[a], picks) {
            continue;
        }
        for b in a + 1..fam.len() {
            if !free(&fam.members[b], picks) {
                continue;
            }
            picks.push(Pick { family: e, interval: fam.members[a] });
            picks.push(Pick { family: e, interval: fam.members[b] });
            if brute_from(families, e + 1, picks) {
                return true;
            }
            picks.truncate(picks.len() - 2);
        }
    }
    false
}

/// Exactly two picks per family, each a member of its family, all pairwise
/// disjoint.
pub fn is_valid_selection(families: &[IntervalFamily], picks: &[Pick]) -> bool {
    let per_family_ok = (0..families.len()).all(|e| {
        let mine: Vec<&Pick> = picks.iter().filter(|p| p.family == e).collect();
        mine.len() == 2 && mine.iter().all(|p| families[e].members.contains(&p.interval))
    });
    let disjoint = picks
        .iter()
        .enumerate()
        .all(|(a, p)| picks[a + 1..].iter().all(|q| p.interval.is_disjoint(&q.interval)));
    per_family_ok && disjoint && picks.len() == 2 * families.len()
}
