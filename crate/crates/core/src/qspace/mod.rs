//! The canonical presentation of the rationals: finite bit-strings under
//! the dense string order, indexed in length-lexicographic order.

use core::fmt;

mod density;
mod interval;
mod partition;
mod point;

pub use density::{
    avoid_members, dense_in, dense_points, find_avoiding_interval, DepthBound, MAX_DEPTH,
};
pub use interval::{locate_in, Endpoint, Interval};
pub use partition::{
    make_simple_partition, partition_product, partition_refines, SimplePartition,
};
pub use point::{q_compare, q_index, q_of_index, Dyadic, QPoint, MAX_LEN};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QSpaceError {
    TooDeep { len: usize },
    BadPointChar(char),
    DegenerateInterval { lo: Endpoint, hi: Endpoint },
    BadBound { depth: u32, budget: u64 },
    /// Set `set` met every examined cell of the current interval.
    NoAvoidingInterval { set: usize },
}

impl fmt::Display for QSpaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QSpaceError::TooDeep { len } => {
                write!(f, "bit-string of length {len} exceeds the maximum {MAX_LEN}")
            }
            QSpaceError::BadPointChar(c) => write!(f, "invalid character {c:?} in bit-string"),
            QSpaceError::DegenerateInterval { lo, hi } => {
                write!(f, "degenerate interval ({lo}, {hi})")
            }
            QSpaceError::BadBound { depth, budget } => write!(
                f,
                "invalid bound: depth {depth} (max {MAX_DEPTH}), budget {budget} (min 1)"
            ),
            QSpaceError::NoAvoidingInterval { set } => {
                write!(f, "set {set} meets every examined subinterval")
            }
        }
    }
}

impl core::error::Error for QSpaceError {}
