//! Seeded random and fixed problem instances.

use qramsey_core::diagforge::Opponent;
use qramsey_core::disjsel::IntervalFamily;
use qramsey_core::fairness::{IndexSet, Matrix, Predicate, RequirementSpec, Var, WitnessEnum};
use qramsey_core::{Interval, QPoint};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A random string: length uniform in `0..=max_len`, then bits uniform.
pub fn random_point<R: Rng>(rng: &mut R, max_len: u8) -> QPoint {
    let len = rng.gen_range(0..=max_len);
    QPoint::from_numeral(len, rng.gen_range(0..1u64 << len))
}

/// Up to `max_size` random points of length at most `max_len`.
pub fn random_endpoints<R: Rng>(rng: &mut R, max_size: usize, max_len: u8) -> Vec<QPoint> {
    let size = rng.gen_range(0..=max_size);
    (0..size).map(|_| random_point(rng, max_len)).collect()
}

/// `size` pairwise disjoint dyadic cells with stems of length `1..=6`.
pub fn random_family<R: Rng>(rng: &mut R, size: usize, family: usize) -> IntervalFamily {
    assert!(size <= 32, "too many cells requested");
    let mut stems: Vec<QPoint> = Vec::with_capacity(size);
    while stems.len() < size {
        let len = rng.gen_range(1..=6u8);
        let s = QPoint::from_numeral(len, rng.gen_range(0..1u64 << len));
        if stems.iter().all(|t| !t.is_prefix_of(s) && !s.is_prefix_of(*t)) {
            stems.push(s);
        }
        // Restart when the stems drawn so far leave too little room.
        if stems.len() < size && coverage(&stems) > 1.0 - (size - stems.len()) as f64 / 64.0 {
            stems.clear();
        }
    }
    IntervalFamily::new(stems.into_iter().map(Interval::cell).collect(), family).expect("disjoint stems")
}

fn coverage(stems: &[QPoint]) -> f64 {
    stems.iter().map(|s| 0.5f64.powi(s.len() as i32)).sum()
}

/// `n` families of `4n` members each.
pub fn random_families(rng: &mut ChaCha8Rng, n: usize) -> Vec<IntervalFamily> {
    (0..n).map(|e| random_family(rng, 4 * n, e)).collect()
}

/// `n` dense walks with seeds derived from `seed`.
pub fn dense_opponents(n: usize, seed: u64) -> Vec<Opponent> {
    (0..n as u64).map(|e| Opponent::DenseWalk { seed: seed.wrapping_mul(1000).wrapping_add(e) }).collect()
}

fn p(s: &str) -> QPoint {
    s.parse().expect("valid literal")
}

/// A fixed mix of requirements with matrices up to 2-by-2, including both
/// degenerate shapes and predicates that never hold.
pub fn requirement_suite() -> Vec<RequirementSpec> {
    let saturating = WitnessEnum::Saturating { max_window: 16 };
    let req = |matrix: Matrix, predicate: Predicate| RequirementSpec {
        matrix,
        predicate,
        witnesses: saturating.clone(),
    };
    let half = QPoint::ROOT;
    let one_by_one = Matrix::new(vec![vec![half]], 1).expect("valid");
    let two_by_one = Matrix::new(vec![vec![p("0")], vec![p("1")]], 1).expect("valid");
    let one_by_two = Matrix::new(vec![vec![p("0"), p("1")]], 2).expect("valid");
    let two_by_two = Matrix::new(vec![vec![p("0"), half], vec![p("01"), p("1")]], 2).expect("valid");
    let even = IndexSet::Residue { modulus: 2, residue: 0 };
    let odd = IndexSet::Residue { modulus: 2, residue: 1 };
    vec![
        req(Matrix::degenerate(0, 1), Predicate::HitsSet { vars: vec![Var::R(0)], set: IndexSet::All }),
        req(Matrix::degenerate(1, 0), Predicate::HitsSet { vars: vec![Var::S(0, 0)], set: IndexSet::All }),
        req(Matrix::degenerate(0, 1), Predicate::ConstFalse),
        req(one_by_one.clone(), Predicate::HitsSet { vars: vec![Var::R(0), Var::S(0, 0)], set: even.clone() }),
        req(one_by_one.clone(), Predicate::HitsEveryCell { set: IndexSet::All }),
        req(two_by_one.clone(), Predicate::ConstFalse),
        req(two_by_one, Predicate::HitsSet { vars: vec![Var::R(0), Var::S(1, 1)], set: odd.clone() }),
        req(one_by_two.clone(), Predicate::HitsSet { vars: vec![Var::R(0), Var::R(1)], set: IndexSet::All }),
        req(two_by_two.clone(), Predicate::HitsSet { vars: vec![Var::R(1), Var::S(0, 2), Var::S(1, 0)], set: even }),
        req(two_by_two.clone(), Predicate::ConstFalse),
        req(Matrix::degenerate(2, 0), Predicate::HitsEveryCell { set: odd }),
        req(one_by_two, Predicate::ConstTrue),
        req(
            two_by_two,
            Predicate::HitsSet { vars: vec![Var::R(0)], set: IndexSet::Finite([3, 4, 5, 6, 7, 8, 9].into()) },
        ),
    ]
}
