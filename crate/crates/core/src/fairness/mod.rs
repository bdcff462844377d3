//! Matrices of rationals, the types and valuations they induce, and the
//! staged construction of a partition `A₀ ∪ A₁` of the rationals against
//! which every essential requirement can diagonalize.
//!
//! Rationals are identified with their indices when deciding membership
//! in `A₀` or `A₁`.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::qspace::{Interval, QPoint, SimplePartition};

mod forge;

pub use forge::{
    check_build, essential_search, fairness_audit, forge_partition, AuditConfig, AuditReport,
    Candidate, CandidateAudit, IndexSet, InvariantViolation, PartitionBuild, Predicate,
    RequirementAudit, RequirementSpec, StageRecord, Var, Witness, WitnessChecks, WitnessEnum,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FairnessError {
    /// Row `row` has `got` entries instead of the declared column count.
    RaggedRow { row: usize, got: usize, cols: usize },
    RowNotIncreasing { row: usize },
    /// Tuple position `position` is an endpoint of the matrix partition.
    EndpointCollision { position: usize, point: QPoint },
    ShapeMismatch { what: &'static str, expected: usize, got: usize },
    /// Type part `part` is not a member of the matrix partition.
    NotAPart { part: usize },
    /// A row-side set has a point outside its interval.
    OutsideInterval { row: usize, interval: usize, point: QPoint },
}

impl fmt::Display for FairnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FairnessError::RaggedRow { row, got, cols } => {
                write!(f, "row {row} has {got} entries, expected {cols}")
            }
            FairnessError::RowNotIncreasing { row } => write!(f, "row {row} is not strictly increasing"),
            FairnessError::EndpointCollision { position, point } => {
                write!(f, "entry {position} ({point:?}) is an endpoint of the partition")
            }
            FairnessError::ShapeMismatch { what, expected, got } => {
                write!(f, "{what}: expected {expected}, got {got}")
            }
            FairnessError::NotAPart { part } => write!(f, "type part {part} is not in the partition"),
            FairnessError::OutsideInterval { row, interval, point } => write!(
                f,
                "row {row}, interval {interval}: point {point:?} lies outside"
            ),
        }
    }
}

impl core::error::Error for FairnessError {}

/// `m` rows of `n` rationals, each row strictly increasing. Either dimension
/// may be zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    cols: usize,
    rows: Vec<Vec<QPoint>>,
}

impl Matrix {
    pub fn new(rows: Vec<Vec<QPoint>>, cols: usize) -> Result<Matrix, FairnessError> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(FairnessError::RaggedRow { row: i, got: row.len(), cols });
            }
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(FairnessError::RowNotIncreasing { row: i });
            }
        }
        Ok(Matrix { cols, rows })
    }

    /// The `m`-by-`n` matrix with `m = 0` or `n = 0`.
    pub fn degenerate(rows: usize, cols: usize) -> Matrix {
        assert!(rows == 0 || cols == 0, "not a degenerate shape");
        Matrix { cols, rows: alloc::vec![Vec::new(); rows] }
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[QPoint] {
        &self.rows[i]
    }

    pub fn entries(&self) -> &[Vec<QPoint>] {
        &self.rows
    }

    pub fn row_partition(&self, i: usize) -> SimplePartition {
        SimplePartition::new(self.rows[i].iter().copied())
    }
}

/// The product of the row partitions; `{ℚ}` for a matrix without rows.
pub fn matrix_partition(m: &Matrix) -> SimplePartition {
    (0..m.rows()).fold(SimplePartition::whole(), |acc, i| acc.product(&m.row_partition(i)))
}

/// An `n`-tuple of members of the matrix partition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MType {
    parts: Vec<Interval>,
}

impl MType {
    pub fn new(m: &Matrix, parts: Vec<Interval>) -> Result<MType, FairnessError> {
        if parts.len() != m.cols() {
            return Err(FairnessError::ShapeMismatch { what: "type parts", expected: m.cols(), got: parts.len() });
        }
        let p = matrix_partition(m);
        if let Some(part) = parts.iter().position(|t| p.position(t).is_none()) {
            return Err(FairnessError::NotAPart { part });
        }
        Ok(MType { parts })
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }
}

/// Every type of `m`, lexicographically in the left-to-right order of
/// the partition members.
pub fn all_types(m: &Matrix) -> Vec<MType> {
    let members = matrix_partition(m).intervals().to_vec();
    let mut out = alloc::vec![MType { parts: Vec::new() }];
    for _ in 0..m.cols() {
        out = out
            .iter()
            .flat_map(|t| {
                members.iter().map(move |&i| {
                    let mut parts = t.parts.clone();
                    parts.push(i);
                    MType { parts }
                })
            })
            .collect();
    }
    out
}

/// The type whose `j`-th part contains `xs[j]`.
pub fn classify_type(m: &Matrix, xs: &[QPoint]) -> Result<MType, FairnessError> {
    if xs.len() != m.cols() {
        return Err(FairnessError::ShapeMismatch { what: "tuple length", expected: m.cols(), got: xs.len() });
    }
    let p = matrix_partition(m);
    let parts = xs
        .iter()
        .enumerate()
        .map(|(position, &x)| {
            p.locate(x)
                .map(|k| p.intervals()[k])
                .ok_or(FairnessError::EndpointCollision { position, point: x })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MType { parts })
}

/// Per row `i`, the leftmost member of the row partition disjoint from
/// every part of `t`. A row has `n + 1` members and each of the `n` parts
/// lies inside one of them, so some member is always free.
pub fn rows_avoiding_type(m: &Matrix, t: &MType) -> Vec<Interval> {
    (0..m.rows())
        .map(|i| {
            *m.row_partition(i)
                .intervals()
                .iter()
                .find(|j| t.parts.iter().all(|p| p.is_disjoint(j)))
                .expect("a row partition has more members than the type has parts")
        })
        .collect()
}

/// Finite sets `R_j` (one per column) and `S_{i,I} ⊆ I` (one per row `i`
/// and member `I` of that row's partition, left to right).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MValuation {
    r: Vec<BTreeSet<QPoint>>,
    s: Vec<Vec<BTreeSet<QPoint>>>,
}

impl MValuation {
    pub fn new(
        m: &Matrix,
        r: Vec<BTreeSet<QPoint>>,
        s: Vec<Vec<BTreeSet<QPoint>>>,
    ) -> Result<MValuation, FairnessError> {
        if r.len() != m.cols() {
            return Err(FairnessError::ShapeMismatch { what: "column sets", expected: m.cols(), got: r.len() });
        }
        if s.len() != m.rows() {
            return Err(FairnessError::ShapeMismatch { what: "row blocks", expected: m.rows(), got: s.len() });
        }
        for (i, blocks) in s.iter().enumerate() {
            let rp = m.row_partition(i);
            if blocks.len() != rp.len() {
                return Err(FairnessError::ShapeMismatch { what: "row intervals", expected: rp.len(), got: blocks.len() });
            }
            for (k, block) in blocks.iter().enumerate() {
                if let Some(&point) = block.iter().find(|&&x| !rp.intervals()[k].contains(x)) {
                    return Err(FairnessError::OutsideInterval { row: i, interval: k, point });
                }
            }
        }
        Ok(MValuation { r, s })
    }

    /// All sets empty.
    pub fn empty(m: &Matrix) -> MValuation {
        MValuation {
            r: alloc::vec![BTreeSet::new(); m.cols()],
            s: (0..m.rows()).map(|i| alloc::vec![BTreeSet::new(); m.row_partition(i).len()]).collect(),
        }
    }

    pub fn r(&self) -> &[BTreeSet<QPoint>] {
        &self.r
    }

    pub fn s(&self) -> &[Vec<BTreeSet<QPoint>>] {
        &self.s
    }

    pub fn points(&self) -> impl Iterator<Item = QPoint> + '_ {
        self.r.iter().flatten().chain(self.s.iter().flatten().flatten()).copied()
    }

    pub fn max_index(&self) -> Option<u64> {
        self.points().map(QPoint::index).max()
    }

    /// `R_j ⊆ T_j` for every column.
    pub fn is_of_type(&self, t: &MType) -> bool {
        self.r.len() == t.parts.len()
            && self.r.iter().zip(&t.parts).all(|(r, p)| r.iter().all(|&x| p.contains(x)))
    }
}

/// Every point of the valuation has index above `s`.
pub fn valuation_exceeds(v: &MValuation, s: u64) -> bool {
    v.points().all(|x| x.index() > s)
}

/// `⋃R ⊆ A₁` and every row has some block `S_{i,I} ⊆ A₀`.
pub fn diagonalizes(v: &MValuation, m: &Matrix, a0: &BTreeSet<u64>, a1: &BTreeSet<u64>) -> bool {
    debug_assert!(a0.is_disjoint(a1));
    debug_assert_eq!(v.s.len(), m.rows());
    v.r.iter().flatten().all(|x| a1.contains(&x.index()))
        && v.s.iter().all(|blocks| blocks.iter().any(|b| b.iter().all(|x| a0.contains(&x.index()))))
}
