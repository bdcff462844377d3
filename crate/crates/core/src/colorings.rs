//! Colorings of pairs and points of the rationals, homogeneity checks, and
//! point colorings assembled from limit approximations.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::qspace::{dense_points, Interval, QPoint};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColoringError {
    EqualPoints(QPoint),
    GroundTooLarge { size: usize, max: usize },
    /// `h(y, ·)` changed after its declared stabilization stage.
    UnstableApprox { y: usize, bound: u64, changed_at: u64 },
    WidthTooLarge { width: usize },
    BadArity { arity: u8 },
    BadColor { color: u8, arity: u8 },
    TableTooLarge { budget: u64 },
}

impl fmt::Display for ColoringError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColoringError::EqualPoints(x) => write!(f, "pair of equal points {x:?}"),
            ColoringError::GroundTooLarge { size, max } => {
                write!(f, "ground set of {size} points exceeds the exhaustive limit {max}")
            }
            ColoringError::UnstableApprox { y, bound, changed_at } => write!(
                f,
                "approximation {y} changes at stage {changed_at}, after its bound {bound}"
            ),
            ColoringError::WidthTooLarge { width } => {
                write!(f, "limit width {width} exceeds {}", MAX_WIDTH)
            }
            ColoringError::BadArity { arity } => write!(f, "pair colorings need at least 2 colors, got {arity}"),
            ColoringError::BadColor { color, arity } => {
                write!(f, "color {color} out of range for {arity} colors")
            }
            ColoringError::TableTooLarge { budget } => {
                write!(f, "random table over {budget} points is too large")
            }
        }
    }
}

impl core::error::Error for ColoringError {}

/// A total symmetric coloring of unordered pairs of distinct rationals.
pub trait PairColoring {
    /// Number of colors `k`; colors are `0..k`.
    fn arity(&self) -> u8;

    /// Color of `{lo, hi}` where `lo <_Q hi`.
    fn color_ordered(&self, lo: QPoint, hi: QPoint) -> u8;

    fn color(&self, x: QPoint, y: QPoint) -> Result<u8, ColoringError> {
        match x.cmp(&y) {
            core::cmp::Ordering::Less => Ok(self.color_ordered(x, y)),
            core::cmp::Ordering::Greater => Ok(self.color_ordered(y, x)),
            core::cmp::Ordering::Equal => Err(ColoringError::EqualPoints(x)),
        }
    }
}

impl<T: PairColoring + ?Sized> PairColoring for &T {
    fn arity(&self) -> u8 {
        (**self).arity()
    }
    fn color_ordered(&self, lo: QPoint, hi: QPoint) -> u8 {
        (**self).color_ordered(lo, hi)
    }
}

impl<T: PairColoring + ?Sized> PairColoring for Box<T> {
    fn arity(&self) -> u8 {
        (**self).arity()
    }
    fn color_ordered(&self, lo: QPoint, hi: QPoint) -> u8 {
        (**self).color_ordered(lo, hi)
    }
}

/// Every pair gets the same color.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstantColoring {
    arity: u8,
    color: u8,
}

impl ConstantColoring {
    pub fn new(arity: u8, color: u8) -> Result<ConstantColoring, ColoringError> {
        check_arity(arity)?;
        check_color(color, arity)?;
        Ok(ConstantColoring { arity, color })
    }
}

impl PairColoring for ConstantColoring {
    fn arity(&self) -> u8 {
        self.arity
    }
    fn color_ordered(&self, _: QPoint, _: QPoint) -> u8 {
        self.color
    }
}

/// For `x <_Q y`: color 0 when `i(x) < i(y)`, color 1 otherwise.
///
/// A homogeneous set of color 0 is one on which the index grows along the
/// order, so no such set can be order-isomorphic to the rationals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counterexample;

impl PairColoring for Counterexample {
    fn arity(&self) -> u8 {
        2
    }
    fn color_ordered(&self, lo: QPoint, hi: QPoint) -> u8 {
        u8::from(lo.index() > hi.index())
    }
}

pub fn counterexample_color(x: QPoint, y: QPoint) -> Result<u8, ColoringError> {
    Counterexample.color(x, y)
}

/// Finitely many explicitly colored pairs; everything else gets `default`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableColoring {
    arity: u8,
    default: u8,
    // Keyed by (smaller index, larger index).
    pairs: BTreeMap<(u64, u64), u8>,
}

impl TableColoring {
    pub fn new(arity: u8, default: u8) -> Result<TableColoring, ColoringError> {
        check_arity(arity)?;
        check_color(default, arity)?;
        Ok(TableColoring { arity, default, pairs: BTreeMap::new() })
    }

    pub fn insert(&mut self, x: QPoint, y: QPoint, color: u8) -> Result<(), ColoringError> {
        check_color(color, self.arity)?;
        if x == y {
            return Err(ColoringError::EqualPoints(x));
        }
        self.pairs.insert(index_key(x, y), color);
        Ok(())
    }

    pub fn default_color(&self) -> u8 {
        self.default
    }

    /// Explicit entries as `(x, y, color)` with `i(x) < i(y)`.
    pub fn entries(&self) -> impl Iterator<Item = (QPoint, QPoint, u8)> + '_ {
        self.pairs
            .iter()
            .map(|(&(a, b), &c)| (QPoint::from_index(a), QPoint::from_index(b), c))
    }
}

impl PairColoring for TableColoring {
    fn arity(&self) -> u8 {
        self.arity
    }
    fn color_ordered(&self, lo: QPoint, hi: QPoint) -> u8 {
        *self.pairs.get(&index_key(lo, hi)).unwrap_or(&self.default)
    }
}

/// Largest index budget a random table may cover (about 8 M pairs).
pub const MAX_RANDOM_BUDGET: u64 = 4096;

/// A seeded uniformly random coloring, tabulated on the rationals of index
/// `≤ budget`; pairs reaching past the budget get `default`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomColoring {
    arity: u8,
    seed: u64,
    budget: u64,
    default: u8,
    // Pair (i, j), i < j ≤ budget, at j(j-1)/2 + i.
    table: Vec<u8>,
}

impl RandomColoring {
    /// Draws the table from ChaCha8 seeded with `seed`, pairs in the order
    /// `(0,1), (0,2), (1,2), (0,3), …`.
    pub fn new(arity: u8, seed: u64, budget: u64) -> Result<RandomColoring, ColoringError> {
        check_arity(arity)?;
        if budget > MAX_RANDOM_BUDGET {
            return Err(ColoringError::TableTooLarge { budget });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = budget as usize + 1;
        let table = (0..n * (n - 1) / 2).map(|_| rng.gen_range(0..arity)).collect();
        Ok(RandomColoring { arity, seed, budget, default: 0, table })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }
}

impl PairColoring for RandomColoring {
    fn arity(&self) -> u8 {
        self.arity
    }
    fn color_ordered(&self, lo: QPoint, hi: QPoint) -> u8 {
        let (i, j) = index_key(lo, hi);
        if j > self.budget {
            return self.default;
        }
        let (i, j) = (i as usize, j as usize);
        self.table[j * (j - 1) / 2 + i]
    }
}

/// A coloring given by a closure on ordered pairs `lo <_Q hi`.
pub struct FnColoring<F> {
    arity: u8,
    rule: F,
}

impl<F: Fn(QPoint, QPoint) -> u8> FnColoring<F> {
    pub fn new(arity: u8, rule: F) -> Result<FnColoring<F>, ColoringError> {
        check_arity(arity)?;
        Ok(FnColoring { arity, rule })
    }
}

impl<F: Fn(QPoint, QPoint) -> u8> PairColoring for FnColoring<F> {
    fn arity(&self) -> u8 {
        self.arity
    }
    fn color_ordered(&self, lo: QPoint, hi: QPoint) -> u8 {
        (self.rule)(lo, hi)
    }
}

fn index_key(x: QPoint, y: QPoint) -> (u64, u64) {
    let (a, b) = (x.index(), y.index());
    (a.min(b), a.max(b))
}

fn check_arity(arity: u8) -> Result<(), ColoringError> {
    if arity < 2 {
        return Err(ColoringError::BadArity { arity });
    }
    Ok(())
}

fn check_color(color: u8, arity: u8) -> Result<(), ColoringError> {
    if color >= arity {
        return Err(ColoringError::BadColor { color, arity });
    }
    Ok(())
}

/// Membership in `A ∩ Red(x)`: points of `A` other than `x` joined to `x`
/// by color 0.
pub fn red_set<'a, C, A>(f: &'a C, x: QPoint, a: A) -> impl Fn(QPoint) -> bool + 'a
where
    C: PairColoring + ?Sized,
    A: Fn(QPoint) -> bool + 'a,
{
    move |y| y != x && a(y) && f.color(x, y) == Ok(0)
}

/// Membership in `A ∩ Blue(x)` (color 1).
pub fn blue_set<'a, C, A>(f: &'a C, x: QPoint, a: A) -> impl Fn(QPoint) -> bool + 'a
where
    C: PairColoring + ?Sized,
    A: Fn(QPoint) -> bool + 'a,
{
    move |y| y != x && a(y) && f.color(x, y) == Ok(1)
}

/// Every pair from `set` gets `color`. Repeated points are ignored.
pub fn is_homogeneous<C: PairColoring + ?Sized>(f: &C, set: &[QPoint], color: u8) -> bool {
    set.iter().enumerate().all(|(k, &x)| {
        set[k + 1..].iter().all(|&y| x == y || f.color(x, y) == Ok(color))
    })
}

/// Largest ground set [`brute_homogeneous`] accepts.
pub const MAX_BRUTE_GROUND: usize = 24;

/// Target of an exhaustive homogeneous-set search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomogeneousGoal {
    /// At least this many points.
    Size(usize),
    /// Meets every cell of the interval at the depth.
    DenseIn { interval: Interval, depth: u32 },
}

/// Exhaustive search of `ground` for a homogeneous set meeting `goal`.
///
/// Colors are tried in order `0..k`; for each color the subsets are
/// explored include-first in ground order, so the first hit is canonical.
pub fn brute_homogeneous<C: PairColoring + ?Sized>(
    f: &C,
    ground: &[QPoint],
    goal: HomogeneousGoal,
) -> Result<Option<(Vec<QPoint>, u8)>, ColoringError> {
    if ground.len() > MAX_BRUTE_GROUND {
        return Err(ColoringError::GroundTooLarge { size: ground.len(), max: MAX_BRUTE_GROUND });
    }
    let mut ground = ground.to_vec();
    ground.dedup();
    for color in 0..f.arity() {
        // adj[i] bit j: {ground[i], ground[j]} has this color.
        let adj: Vec<u32> = (0..ground.len())
            .map(|i| {
                (0..ground.len())
                    .filter(|&j| j != i && f.color(ground[i], ground[j]) == Ok(color))
                    .fold(0u32, |m, j| m | 1 << j)
            })
            .collect();
        let mut chosen = Vec::new();
        let all = if ground.is_empty() { 0 } else { u32::MAX >> (32 - ground.len()) };
        if search_cliques(&ground, &adj, all, 0, &mut chosen, &goal) {
            return Ok(Some((chosen.iter().map(|&k| ground[k]).collect(), color)));
        }
    }
    Ok(None)
}

fn goal_met(ground: &[QPoint], chosen: &[usize], goal: &HomogeneousGoal) -> bool {
    match goal {
        HomogeneousGoal::Size(n) => chosen.len() >= *n,
        HomogeneousGoal::DenseIn { interval, depth } => {
            let pts: Vec<QPoint> = chosen.iter().map(|&k| ground[k]).collect();
            dense_points(&pts, interval, *depth)
        }
    }
}

fn search_cliques(
    ground: &[QPoint],
    adj: &[u32],
    candidates: u32,
    from: usize,
    chosen: &mut Vec<usize>,
    goal: &HomogeneousGoal,
) -> bool {
    if goal_met(ground, chosen, goal) {
        return true;
    }
    if let HomogeneousGoal::Size(n) = goal {
        if chosen.len() + ((candidates >> from).count_ones() as usize) < *n {
            return false;
        }
    }
    for k in from..ground.len() {
        if candidates & (1 << k) == 0 {
            continue;
        }
        chosen.push(k);
        if search_cliques(ground, adj, candidates & adj[k], k + 1, chosen, goal) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// A total coloring of single rationals with `arity` colors.
pub trait PointColoring {
    fn arity(&self) -> u64;
    fn color(&self, x: QPoint) -> u64;
}

/// A family of 2-colorings `d(n, ·)` indexed by a level `n`.
pub trait LevelColoring {
    fn level_color(&self, level: u64, x: QPoint) -> u8;
}

impl<T: LevelColoring + ?Sized> LevelColoring for &T {
    fn level_color(&self, level: u64, x: QPoint) -> u8 {
        (**self).level_color(level, x)
    }
}

/// One approximation sequence `s ↦ h(y, s)`: piecewise constant, with a
/// declared stage after which it no longer changes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Track {
    // (stage, value) sorted by stage; the value holds from that stage on.
    changes: Vec<(u64, u64)>,
    settles_by: u64,
}

impl Track {
    /// A sequence that is `value` at every stage.
    pub fn constant(value: u64) -> Track {
        Track { changes: alloc::vec![(0, value)], settles_by: 0 }
    }

    /// `changes` are `(stage, value)` pairs; before the first change the
    /// value is 0.
    pub fn new(mut changes: Vec<(u64, u64)>, settles_by: u64) -> Track {
        changes.sort_by_key(|&(s, _)| s);
        changes.dedup_by_key(|&mut (s, _)| s);
        Track { changes, settles_by }
    }

    pub fn at(&self, stage: u64) -> u64 {
        let k = self.changes.partition_point(|&(s, _)| s <= stage);
        if k == 0 {
            0
        } else {
            self.changes[k - 1].1
        }
    }

    pub fn limit(&self) -> u64 {
        self.changes.last().map_or(0, |&(_, v)| v)
    }

    pub fn settles_by(&self) -> u64 {
        self.settles_by
    }

    pub fn changes(&self) -> &[(u64, u64)] {
        &self.changes
    }

    /// Stage of the last actual change of value.
    fn last_change(&self) -> u64 {
        let mut last = 0;
        let mut prev = 0;
        for &(s, v) in &self.changes {
            if v != prev {
                last = s;
            }
            prev = v;
        }
        last
    }
}

/// A limit approximation `h(y, s)` for `y < width`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitApprox {
    tracks: Vec<Track>,
}

/// Widest limit approximation whose colors fit a `u64`.
pub const MAX_WIDTH: usize = 63;

impl LimitApprox {
    pub fn new(tracks: Vec<Track>) -> LimitApprox {
        LimitApprox { tracks }
    }

    /// Tabulates `h` on stages `0..horizon`.
    pub fn from_fn<H: Fn(usize, u64) -> u64>(
        width: usize,
        bounds: &[u64],
        horizon: u64,
        h: H,
    ) -> LimitApprox {
        let tracks = (0..width)
            .map(|y| {
                let mut changes = Vec::new();
                let mut prev = None;
                for s in 0..horizon {
                    let v = h(y, s);
                    if prev != Some(v) {
                        changes.push((s, v));
                        prev = Some(v);
                    }
                }
                Track::new(changes, bounds.get(y).copied().unwrap_or(0))
            })
            .collect();
        LimitApprox { tracks }
    }

    pub fn width(&self) -> usize {
        self.tracks.len()
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    pub fn at(&self, y: usize, stage: u64) -> u64 {
        self.tracks[y].at(stage)
    }

    /// Checks every track is constant from its declared bound on.
    pub fn audit(&self) -> Result<(), ColoringError> {
        if self.tracks.len() > MAX_WIDTH {
            return Err(ColoringError::WidthTooLarge { width: self.tracks.len() });
        }
        for (y, t) in self.tracks.iter().enumerate() {
            let changed_at = t.last_change();
            if changed_at > t.settles_by {
                return Err(ColoringError::UnstableApprox { y, bound: t.settles_by, changed_at });
            }
        }
        Ok(())
    }
}

/// The `2^width`-coloring `x ↦ ⟨d(h(y, i(x)), x) : y < width⟩`, bit `y` of
/// the color being the `y`-th entry.
pub struct LimitColoring<'a, D> {
    approx: &'a LimitApprox,
    levels: D,
}

impl<D: LevelColoring> LimitColoring<'_, D> {
    pub fn bit(&self, y: usize, x: QPoint) -> u8 {
        self.levels.level_color(self.approx.at(y, x.index()), x)
    }
}

impl<D: LevelColoring> PointColoring for LimitColoring<'_, D> {
    fn arity(&self) -> u64 {
        1 << self.approx.width()
    }
    fn color(&self, x: QPoint) -> u64 {
        (0..self.approx.width()).fold(0, |acc, y| acc | (self.bit(y, x) as u64 & 1) << y)
    }
}

pub fn limit_coloring<D: LevelColoring>(
    approx: &LimitApprox,
    levels: D,
) -> Result<LimitColoring<'_, D>, ColoringError> {
    approx.audit()?;
    Ok(LimitColoring { approx, levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> QPoint {
        s.parse().unwrap()
    }

    fn first(n: u64) -> Vec<QPoint> {
        (0..n).map(QPoint::from_index).collect()
    }

    #[test]
    fn counterexample_examples() {
        assert_eq!(counterexample_color(p("0"), p("1")), Ok(0));
        assert_eq!(counterexample_color(p("0"), QPoint::ROOT), Ok(1));
        assert_eq!(counterexample_color(QPoint::ROOT, p("0")), Ok(1));
        assert_eq!(
            counterexample_color(p("01"), p("01")),
            Err(ColoringError::EqualPoints(p("01")))
        );
    }

    #[test]
    fn red_sets_of_constant_colorings() {
        let zero = ConstantColoring::new(2, 0).unwrap();
        let one = ConstantColoring::new(2, 1).unwrap();
        let x = p("01");
        let red0 = red_set(&zero, x, |_| true);
        let red1 = red_set(&one, x, |_| true);
        for y in first(63) {
            assert_eq!(red0(y), y != x);
            assert!(!red1(y));
        }
    }

    #[test]
    fn red_set_of_root_under_counterexample() {
        let red = red_set(&Counterexample, QPoint::ROOT, |_| true);
        for y in first(15) {
            if y > QPoint::ROOT {
                assert!(red(y), "{y:?}");
            } else {
                assert!(!red(y), "{y:?}");
            }
        }
    }

    #[test]
    fn homogeneity_examples() {
        let zero = ConstantColoring::new(2, 0).unwrap();
        assert!(is_homogeneous(&Counterexample, &[], 0));
        assert!(is_homogeneous(&Counterexample, &[], 1));
        assert!(is_homogeneous(&zero, &first(20), 0));
        assert!(is_homogeneous(&Counterexample, &[p("0"), p("1")], 0));
        assert!(!is_homogeneous(&Counterexample, &[p("0"), p("1"), QPoint::ROOT], 0));
    }

    #[test]
    fn brute_force_examples() {
        let zero = ConstantColoring::new(2, 0).unwrap();
        let ground = first(8);
        let (set, c) = brute_homogeneous(&zero, &ground, HomogeneousGoal::Size(8))
            .unwrap()
            .unwrap();
        assert_eq!((set, c), (ground.clone(), 0));

        let found = brute_homogeneous(&Counterexample, &ground, HomogeneousGoal::Size(3)).unwrap();
        assert!(found.is_some());
        assert_eq!(
            brute_homogeneous(&zero, &ground, HomogeneousGoal::Size(9)).unwrap(),
            None
        );
        assert!(matches!(
            brute_homogeneous(&zero, &first(25), HomogeneousGoal::Size(2)),
            Err(ColoringError::GroundTooLarge { .. })
        ));
    }

    #[test]
    fn counterexample_has_decreasing_chain_of_three() {
        // Exhaustively: a 1-homogeneous 3-set among the first 8 rationals is
        // a <_Q-chain along which the index decreases.
        let ground = first(8);
        let mut found = false;
        for a in 0..8 {
            for b in 0..8 {
                for c in 0..8 {
                    let (x, y, z) = (ground[a], ground[b], ground[c]);
                    if x < y && y < z && a > b && b > c {
                        assert!(is_homogeneous(&Counterexample, &[x, y, z], 1));
                        found = true;
                    }
                }
            }
        }
        assert!(found);
    }

    #[test]
    fn random_coloring_is_reproducible() {
        let a = RandomColoring::new(2, 7, 64).unwrap();
        let b = RandomColoring::new(2, 7, 64).unwrap();
        let c = RandomColoring::new(2, 8, 64).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let pts = first(65);
        for &x in &pts {
            for &y in &pts {
                if x != y {
                    assert_eq!(a.color(x, y), a.color(y, x));
                }
            }
        }
        assert!(RandomColoring::new(2, 0, MAX_RANDOM_BUDGET + 1).is_err());
    }

    #[test]
    fn table_coloring_defaults() {
        let mut t = TableColoring::new(3, 2).unwrap();
        t.insert(p("1"), p("0"), 1).unwrap();
        assert_eq!(t.color(p("0"), p("1")), Ok(1));
        assert_eq!(t.color(p("0"), p("00")), Ok(2));
        assert!(t.insert(p("0"), p("1"), 3).is_err());
    }

    struct Levels;
    impl LevelColoring for Levels {
        // d(n, x) = bit n of the index of x
        fn level_color(&self, level: u64, x: QPoint) -> u8 {
            ((x.index() >> level) & 1) as u8
        }
    }

    #[test]
    fn limit_coloring_degenerate_width() {
        let approx = LimitApprox::new(Vec::new());
        let f = limit_coloring(&approx, Levels).unwrap();
        assert_eq!(f.arity(), 1);
        assert!(first(100).into_iter().all(|x| f.color(x) == 0));
    }

    #[test]
    fn limit_coloring_constant_track() {
        let approx = LimitApprox::new(alloc::vec![Track::constant(3)]);
        let f = limit_coloring(&approx, Levels).unwrap();
        for x in first(100) {
            assert_eq!(f.color(x), (x.index() >> 3) & 1);
        }
    }

    #[test]
    fn limit_coloring_after_stabilization() {
        let approx = LimitApprox::from_fn(2, &[10, 10], 50, |y, s| {
            if s < 10 {
                (s % 3) + 4
            } else {
                y as u64 + 1
            }
        });
        let f = limit_coloring(&approx, Levels).unwrap();
        for x in first(200).into_iter().filter(|x| x.index() >= 10) {
            let c = f.color(x);
            assert_eq!(c & 1, (x.index() >> 1) & 1);
            assert_eq!((c >> 1) & 1, (x.index() >> 2) & 1);
        }
    }

    #[test]
    fn unstable_approximation_rejected() {
        let approx = LimitApprox::new(alloc::vec![Track::new(alloc::vec![(0, 1), (12, 2)], 10)]);
        assert_eq!(
            limit_coloring(&approx, Levels).err(),
            Some(ColoringError::UnstableApprox { y: 0, bound: 10, changed_at: 12 })
        );
    }
}
