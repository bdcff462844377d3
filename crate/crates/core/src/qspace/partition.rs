use alloc::vec::Vec;

use super::{locate_in, Endpoint, Interval, QPoint};

/// The open intervals cut out of the line by a finite set of endpoints.
///
/// With sorted endpoints `x_0 < … < x_{n-1}` the members are
/// `(-∞, x_0), (x_0, x_1), …, (x_{n-1}, +∞)`; the empty set yields the
/// single interval `(-∞, +∞)`. Endpoints belong to no member.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimplePartition {
    endpoints: Vec<QPoint>,
    intervals: Vec<Interval>,
}

impl SimplePartition {
    pub fn new<I: IntoIterator<Item = QPoint>>(points: I) -> SimplePartition {
        let mut endpoints: Vec<QPoint> = points.into_iter().collect();
        endpoints.sort_unstable();
        endpoints.dedup();
        let mut intervals = Vec::with_capacity(endpoints.len() + 1);
        let mut lo = Endpoint::NegInf;
        for &x in &endpoints {
            intervals.push(Interval::new(lo, Endpoint::At(x)).expect("sorted endpoints"));
            lo = Endpoint::At(x);
        }
        intervals.push(Interval::new(lo, Endpoint::PosInf).expect("sorted endpoints"));
        SimplePartition { endpoints, intervals }
    }

    /// The trivial partition `{(-∞, +∞)}`.
    pub fn whole() -> SimplePartition {
        SimplePartition::new(core::iter::empty())
    }

    pub fn endpoints(&self) -> &[QPoint] {
        &self.endpoints
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_endpoint(&self, x: QPoint) -> bool {
        self.endpoints.binary_search(&x).is_ok()
    }

    /// Position of the member containing `x`; `None` for endpoints.
    pub fn locate(&self, x: QPoint) -> Option<usize> {
        locate_in(&self.intervals, x)
    }

    /// Position of `interval` among the members, if it is one.
    pub fn position(&self, interval: &Interval) -> Option<usize> {
        self.intervals.iter().position(|i| i == interval)
    }

    /// Every member of `self` lies inside some member of `other`.
    pub fn refines(&self, other: &SimplePartition) -> bool {
        self.intervals
            .iter()
            .all(|i| other.intervals.iter().any(|j| j.contains_interval(i)))
    }

    /// `{I ∩ J : I ∈ self, J ∈ other}` with empty intersections dropped.
    pub fn product(&self, other: &SimplePartition) -> SimplePartition {
        let mut pieces: Vec<Interval> = self
            .intervals
            .iter()
            .flat_map(|i| other.intervals.iter().filter_map(move |j| i.intersect(j)))
            .collect();
        pieces.sort_unstable_by_key(|i| i.lo());
        // The pieces tile the line, so their right ends (bar the last) are
        // exactly the cut points.
        let cuts = pieces.iter().filter_map(|i| i.hi().point());
        let product = SimplePartition::new(cuts);
        debug_assert_eq!(product.intervals, pieces);
        product
    }
}

pub fn make_simple_partition<I: IntoIterator<Item = QPoint>>(points: I) -> SimplePartition {
    SimplePartition::new(points)
}

pub fn partition_refines(p: &SimplePartition, q: &SimplePartition) -> bool {
    p.refines(q)
}

pub fn partition_product(p: &SimplePartition, q: &SimplePartition) -> SimplePartition {
    p.product(q)
}
