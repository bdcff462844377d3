use alloc::vec::Vec;
use core::fmt;

use super::{QPoint, QSpaceError};

/// An interval endpoint. Variant order gives `-∞ < x < +∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    NegInf,
    At(QPoint),
    PosInf,
}

impl Endpoint {
    pub fn point(self) -> Option<QPoint> {
        match self {
            Endpoint::At(x) => Some(x),
            _ => None,
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::NegInf => f.write_str("-inf"),
            Endpoint::At(x) => write!(f, "{x}"),
            Endpoint::PosInf => f.write_str("+inf"),
        }
    }
}

/// An open interval `(lo, hi)` of the dense order. Never empty.
///
/// `Ord` compares left endpoints, then right endpoints.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    lo: Endpoint,
    hi: Endpoint,
}

impl Interval {
    /// The whole line `(-∞, +∞)`.
    pub const WHOLE: Interval = Interval { lo: Endpoint::NegInf, hi: Endpoint::PosInf };

    pub fn new(lo: Endpoint, hi: Endpoint) -> Result<Interval, QSpaceError> {
        if lo == Endpoint::PosInf || hi == Endpoint::NegInf || lo >= hi {
            return Err(QSpaceError::DegenerateInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn between(lo: QPoint, hi: QPoint) -> Result<Interval, QSpaceError> {
        Interval::new(Endpoint::At(lo), Endpoint::At(hi))
    }

    pub fn above(lo: QPoint) -> Interval {
        Interval { lo: Endpoint::At(lo), hi: Endpoint::PosInf }
    }

    pub fn below(hi: QPoint) -> Interval {
        Interval { lo: Endpoint::NegInf, hi: Endpoint::At(hi) }
    }

    /// The strings extending `stem`: a dyadic cell of the whole line.
    pub fn cell(stem: QPoint) -> Interval {
        // Bounded on the left by the longest prefix that stem leaves through
        // a 1, on the right by the longest prefix it leaves through a 0.
        let mut lo = Endpoint::NegInf;
        let mut hi = Endpoint::PosInf;
        for j in (0..stem.len()).rev() {
            let prefix = Endpoint::At(stem.prefix(j));
            if stem.bit(j) {
                if lo == Endpoint::NegInf {
                    lo = prefix;
                }
            } else if hi == Endpoint::PosInf {
                hi = prefix;
            }
            if lo != Endpoint::NegInf && hi != Endpoint::PosInf {
                break;
            }
        }
        Interval { lo, hi }
    }

    pub fn lo(&self) -> Endpoint {
        self.lo
    }

    pub fn hi(&self) -> Endpoint {
        self.hi
    }

    pub fn contains(&self, x: QPoint) -> bool {
        self.lo < Endpoint::At(x) && Endpoint::At(x) < self.hi
    }

    /// `other ⊆ self`.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn is_disjoint(&self, other: &Interval) -> bool {
        self.hi <= other.lo || other.hi <= self.lo
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi)).ok()
    }

    /// The shortest string inside the interval. It is unique: two distinct
    /// strings of equal length have a shorter string between them.
    pub fn midpoint(&self) -> QPoint {
        let mut cur = QPoint::ROOT;
        loop {
            let at = Endpoint::At(cur);
            let next = if at <= self.lo {
                cur.child(true)
            } else if at >= self.hi {
                cur.child(false)
            } else {
                return cur;
            };
            cur = next.expect("interval too narrow for the representable depth");
        }
    }

    /// Splits at the midpoint into the left and right halves.
    pub fn split(&self) -> (Interval, Interval) {
        let m = Endpoint::At(self.midpoint());
        (Interval { lo: self.lo, hi: m }, Interval { lo: m, hi: self.hi })
    }

    /// The `2^depth` cells of the interval at the given depth, left to right.
    pub fn subcells(&self, depth: u32) -> Vec<Interval> {
        let mut cells = alloc::vec![*self];
        for _ in 0..depth {
            cells = cells
                .iter()
                .flat_map(|c| {
                    let (l, r) = c.split();
                    [l, r]
                })
                .collect();
        }
        cells
    }

    /// All cells of depth `0..=depth`, shallow first and left to right
    /// within a depth.
    pub fn cells_upto(&self, depth: u32) -> Vec<(u32, Interval)> {
        let mut out = Vec::new();
        let mut level = alloc::vec![*self];
        for d in 0..=depth {
            out.extend(level.iter().map(|c| (d, *c)));
            if d < depth {
                level = level
                    .iter()
                    .flat_map(|c| {
                        let (l, r) = c.split();
                        [l, r]
                    })
                    .collect();
            }
        }
        out
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.lo, self.hi)
    }
}

/// Locates points in a left-to-right list of pairwise disjoint cells.
///
/// Returns the position of the cell containing `x`, or `None` when `x`
/// falls between cells (on a shared endpoint) or outside all of them.
pub fn locate_in(cells: &[Interval], x: QPoint) -> Option<usize> {
    let at = Endpoint::At(x);
    let k = cells.partition_point(|c| c.hi <= at);
    (k < cells.len() && cells[k].contains(x)).then_some(k)
}
