//! Finitized density: "dense in an interval" checked against dyadic cells
//! down to a fixed depth, looking only at rationals of bounded index.

use alloc::vec::Vec;

use super::{locate_in, Interval, QPoint, QSpaceError};

/// Deepest cell resolution accepted by [`DepthBound`].
pub const MAX_DEPTH: u32 = 24;

/// Resolution of the density checks: cells down to `depth`, rationals of
/// index at most `budget`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DepthBound {
    depth: u32,
    budget: u64,
}

impl DepthBound {
    pub fn new(depth: u32, budget: u64) -> Result<DepthBound, QSpaceError> {
        if budget == 0 || depth > MAX_DEPTH {
            return Err(QSpaceError::BadBound { depth, budget });
        }
        Ok(DepthBound { depth, budget })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// The rationals of index `0..=budget`, in index order.
    pub fn universe(&self) -> impl Iterator<Item = QPoint> {
        (0..=self.budget).map(QPoint::from_index)
    }

    /// Members of `set` inside `within`, in index order.
    pub fn members<F>(&self, set: F, within: &Interval) -> Vec<QPoint>
    where
        F: Fn(QPoint) -> bool,
    {
        self.universe().filter(|&x| within.contains(x) && set(x)).collect()
    }
}

/// Whether `points` meets every cell of `interval` at `depth`.
///
/// Meeting every cell at the deepest level implies meeting every coarser
/// cell, so only that level is examined.
pub fn dense_points(points: &[QPoint], interval: &Interval, depth: u32) -> bool {
    let cells = interval.subcells(depth);
    let mut hit = alloc::vec![false; cells.len()];
    let mut missing = cells.len();
    for &x in points {
        if let Some(k) = locate_in(&cells, x) {
            if !hit[k] {
                hit[k] = true;
                missing -= 1;
                if missing == 0 {
                    return true;
                }
            }
        }
    }
    false
}

/// Whether `set`, restricted to indices `≤ bound.budget()`, meets every
/// dyadic subinterval of `interval` of depth `≤ bound.depth()`.
pub fn dense_in<F>(set: F, interval: &Interval, bound: DepthBound) -> bool
where
    F: Fn(QPoint) -> bool,
{
    dense_points(&bound.members(set, interval), interval, bound.depth())
}

/// Finds `J ⊆ interval` missing every set (up to the index budget).
///
/// The sets are avoided one after the other: `J_0 = interval`, and `J_{k+1}`
/// is the first cell of `J_k` (depth `0..=bound.depth()`, shallow first,
/// rightmost first within a depth) containing no member of set `k`.
pub fn find_avoiding_interval(
    sets: &[&dyn Fn(QPoint) -> bool],
    interval: &Interval,
    bound: DepthBound,
) -> Result<Interval, QSpaceError> {
    let members: Vec<Vec<QPoint>> = sets.iter().map(|s| bound.members(s, interval)).collect();
    avoid_members(&members, None, interval, bound.depth())
}

/// [`find_avoiding_interval`] over explicit finite sets, optionally
/// insisting that every narrowing step keeps some point of `keep`.
///
/// The `keep` constraint matters once sets are finite: a cell can avoid
/// everything simply by being too small to hold any examined point.
pub fn avoid_members(
    sets: &[Vec<QPoint>],
    keep: Option<&[QPoint]>,
    interval: &Interval,
    depth: u32,
) -> Result<Interval, QSpaceError> {
    let mut current = *interval;
    for (k, set) in sets.iter().enumerate() {
        if !set.iter().any(|&x| current.contains(x)) {
            continue;
        }
        let cells = current.cells_upto(depth);
        let mut found = None;
        for d in 0..=depth {
            let level = cells.iter().filter(|(cd, _)| *cd == d).rev();
            found = level
                .map(|(_, c)| *c)
                .find(|c| {
                    !set.iter().any(|&x| c.contains(x))
                        && keep.is_none_or(|pts| pts.iter().any(|&x| c.contains(x)))
                });
            if found.is_some() {
                break;
            }
        }
        current = found.ok_or(QSpaceError::NoAvoidingInterval { set: k })?;
    }
    if let Some(pts) = keep {
        if !pts.iter().any(|&x| current.contains(x)) {
            return Err(QSpaceError::NoAvoidingInterval { set: sets.len() });
        }
    }
    Ok(current)
}
