//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use qramsey::instances::{dense_opponents, random_endpoints, random_families, requirement_suite};
use qramsey::report::{diag_json, forge_json, render, selection_json, solution_json};
use qramsey_core::colorings::{is_homogeneous, ConstantColoring, Counterexample, PairColoring, RandomColoring};
use qramsey_core::diagforge::{diag_run, verify_defeat};
use qramsey_core::disjsel::{brute_force_selection, select_two_per_family, IntervalFamily, Selection};
use qramsey_core::ersolver::{er_solve, PositivityOracle, SolutionKind};
use qramsey_core::fairness::{
    all_types, check_build, classify_type, fairness_audit, forge_partition, rows_avoiding_type, AuditConfig, Matrix,
    MValuation, PartitionBuild,
};
use qramsey_core::{DepthBound, Endpoint, Interval, QPoint, SimplePartition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

/// Exact comparison of the dyadic values, independent of `QPoint`'s `Ord`.
fn cmp_value(a: QPoint, b: QPoint) -> Ordering {
    let (x, y) = (a.value(), b.value());
    let e = x.exp.max(y.exp);
    ((x.num as u128) << (e - x.exp)).cmp(&((y.num as u128) << (e - y.exp)))
}

fn sorted_by_value(mut v: Vec<QPoint>) -> Vec<QPoint> {
    v.sort_by(|a, b| cmp_value(*a, *b));
    v.dedup();
    v
}

fn end_cmp(e: Endpoint, x: QPoint) -> Ordering {
    match e {
        Endpoint::NegInf => Ordering::Less,
        Endpoint::PosInf => Ordering::Greater,
        Endpoint::At(p) => cmp_value(p, x),
    }
}

fn inside(i: &Interval, x: QPoint) -> bool {
    end_cmp(i.lo(), x) == Ordering::Less && end_cmp(i.hi(), x) == Ordering::Greater
}

/// Open intervals are disjoint iff one ends at or before the other starts.
fn apart(a: &Interval, b: &Interval) -> bool {
    let le = |hi: Endpoint, lo: Endpoint| match (hi, lo) {
        (Endpoint::NegInf, _) | (_, Endpoint::PosInf) => true,
        (Endpoint::PosInf, _) | (_, Endpoint::NegInf) => false,
        (Endpoint::At(h), Endpoint::At(l)) => cmp_value(h, l) != Ordering::Greater,
    };
    le(a.hi(), b.lo()) || le(b.hi(), a.lo())
}

fn within(limit: Duration, start: Instant, detail: String) -> Outcome {
    let took = start.elapsed();
    if took <= limit {
        Ok(format!("{detail}, {:.2}s", took.as_secs_f64()))
    } else {
        Err(format!("{detail}, took {:.2}s over the {}s limit", took.as_secs_f64(), limit.as_secs()))
    }
}

fn partition_algebra() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..500 {
        let s = random_endpoints(&mut rng, 8, 6);
        let t = random_endpoints(&mut rng, 8, 6);
        let (ps, pt) = (SimplePartition::new(s.clone()), SimplePartition::new(t.clone()));
        let prod = ps.product(&pt);
        let union: Vec<QPoint> = s.iter().chain(&t).copied().collect();
        if prod != SimplePartition::new(union.clone()) {
            return Err(format!("trial {trial}: product differs from the union partition"));
        }
        if prod.endpoints() != sorted_by_value(union).as_slice() {
            return Err(format!("trial {trial}: product endpoints are not the sorted union"));
        }
        if !prod.refines(&ps) || !prod.refines(&pt) {
            return Err(format!("trial {trial}: product fails to refine a factor"));
        }
    }
    within(Duration::from_secs(5), start, "500 pairs".into())
}

fn check_selection(fams: &[IntervalFamily], sel: &Selection) -> Result<(), String> {
    let n = fams.len();
    if sel.picks.len() != 2 * n {
        return Err(format!("{} picks for {n} families", sel.picks.len()));
    }
    for e in 0..n {
        let mine: Vec<_> = sel.picks.iter().filter(|p| p.family == e).collect();
        if mine.len() != 2 {
            return Err(format!("family {e} got {} picks", mine.len()));
        }
        if mine.iter().any(|p| !fams[e].members().contains(&p.interval)) {
            return Err(format!("family {e} got a foreign interval"));
        }
    }
    for (i, a) in sel.picks.iter().enumerate() {
        for b in &sel.picks[i + 1..] {
            if !apart(&a.interval, &b.interval) {
                return Err(format!("picks {} and {} overlap", a.interval, b.interval));
            }
        }
    }
    for r in &sel.trace {
        for e in 0..n {
            if r.chosen[e] > 2 {
                return Err(format!("stage {}: family {e} over two picks", r.stage));
            }
            if r.chosen[e] < 2 && r.live_after[e] + 2 * r.stage < 4 * n {
                return Err(format!("stage {}: family {e} has {} live", r.stage, r.live_after[e]));
            }
        }
    }
    Ok(())
}

fn selection_reports(seed: u64) -> Result<Vec<String>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for n in 1..=3 {
        for trial in 0..1000 {
            let fams = random_families(&mut rng, n);
            let sel = select_two_per_family(&fams).map_err(|e| format!("n={n} trial {trial}: {e}"))?;
            check_selection(&fams, &sel).map_err(|e| format!("n={n} trial {trial}: {e}"))?;
            match brute_force_selection(&fams) {
                Ok(Some(_)) => {}
                other => return Err(format!("n={n} trial {trial}: brute force gave {other:?}")),
            }
            out.push(render(&selection_json(&fams, &sel)));
        }
    }
    Ok(out)
}

fn disjoint_selection() -> Outcome {
    let start = Instant::now();
    selection_reports(2)?;
    within(Duration::from_secs(30), start, "3000 instances".into())
}

fn counterexample() -> Outcome {
    let pts: Vec<QPoint> = (0..127).map(QPoint::from_index).collect();
    for &x in &pts {
        for &y in &pts {
            if x == y {
                continue;
            }
            let (lo, hi) = if cmp_value(x, y) == Ordering::Less { (x, y) } else { (y, x) };
            let want = if lo.index() < hi.index() { 0 } else { 1 };
            if Counterexample.color(x, y) != Ok(want) {
                return Err(format!("pair ({x}, {y})"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..10_000 {
        let size = rng.gen_range(2..=7);
        let set: Vec<QPoint> = (0..size).map(|_| pts[rng.gen_range(0..pts.len())]).collect();
        let set = sorted_by_value(set);
        let idx: Vec<u64> = set.iter().map(|x| x.index()).collect();
        let inc = idx.windows(2).all(|w| w[0] < w[1]);
        let dec = idx.windows(2).all(|w| w[0] > w[1]);
        if is_homogeneous(&Counterexample, &set, 0) != inc || is_homogeneous(&Counterexample, &set, 1) != dec {
            return Err(format!("subset {trial}"));
        }
    }
    Ok("127 points, 10000 subsets".into())
}

const SOLVE_DEPTH: u32 = 3;
const SOLVE_BUDGET: u64 = 1 << 10;
const SOLVE_LENGTH: usize = 4;
const SOLVE_STEPS: usize = 15;

fn solve_reports() -> Result<(Vec<String>, usize), String> {
    let o = PositivityOracle::new(DepthBound::new(SOLVE_DEPTH, SOLVE_BUDGET).expect("valid bound"));
    let mut out = Vec::new();
    let mut completed = 0;
    for seed in 0..100 {
        let f = RandomColoring::new(2, seed, SOLVE_BUDGET).expect("table fits");
        match er_solve(&f, &o, SOLVE_LENGTH, SOLVE_STEPS) {
            Ok(sol) => {
                check_solution(&f, sol.kind, &sol.points, sol.witness).map_err(|e| format!("seed {seed}: {e}"))?;
                completed += 1;
                out.push(render(&solution_json(&sol)));
            }
            Err(e) if e.is_budget() => out.push(format!("budget: {e}")),
            Err(e) => return Err(format!("seed {seed}: {e}")),
        }
    }
    Ok((out, completed))
}

fn check_solution<C: PairColoring>(
    f: &C,
    kind: SolutionKind,
    points: &[QPoint],
    witness: Option<Interval>,
) -> Result<(), String> {
    let c = kind.color();
    for (i, &x) in points.iter().enumerate() {
        for &y in &points[i + 1..] {
            if f.color(x, y) != Ok(c) {
                return Err(format!("pair ({x}, {y}) is not color {c}"));
            }
        }
    }
    if kind == SolutionKind::Dense1 {
        let w = witness.ok_or("Dense1 without witness")?;
        for cell in w.subcells(SOLVE_DEPTH) {
            if !points.iter().any(|&x| inside(&cell, x)) {
                return Err(format!("cell {cell} missed"));
            }
        }
    }
    Ok(())
}

fn solver() -> Outcome {
    let start = Instant::now();
    let (_, completed) = solve_reports()?;
    if completed < 90 {
        return Err(format!("only {completed}/100 completed"));
    }
    let o = PositivityOracle::new(DepthBound::new(SOLVE_DEPTH, SOLVE_BUDGET).expect("valid bound"));
    for (color, kind) in [(0, SolutionKind::Infinite0), (1, SolutionKind::Dense1)] {
        let f = ConstantColoring::new(2, color).expect("valid");
        let sol = er_solve(&f, &o, SOLVE_LENGTH, SOLVE_STEPS).map_err(|e| format!("f = {color}: {e}"))?;
        if sol.kind != kind {
            return Err(format!("f = {color} gave {:?}", sol.kind));
        }
        check_solution(&f, sol.kind, &sol.points, sol.witness).map_err(|e| format!("f = {color}: {e}"))?;
    }
    within(Duration::from_secs(60), start, format!("{completed}/100 completed"))
}

/// All strictly increasing rows of length `n` over `grid`.
fn rows_of(grid: &[QPoint], n: usize) -> Vec<Vec<QPoint>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in grid.iter().enumerate() {
        for mut rest in rows_of(&grid[i + 1..], n - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

fn tuples(grid: &[QPoint], n: usize) -> Vec<Vec<QPoint>> {
    (0..n).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|t| {
                grid.iter().map(move |&x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect()
    })
}

/// The open interval between the neighbours of `x` among `cuts`.
fn cell_around(cuts: &[QPoint], x: QPoint) -> Option<Interval> {
    if cuts.contains(&x) {
        return None;
    }
    let lo = cuts.iter().rfind(|&&c| cmp_value(c, x) == Ordering::Less);
    let hi = cuts.iter().find(|&&c| cmp_value(c, x) == Ordering::Greater);
    let lo = lo.map_or(Endpoint::NegInf, |&p| Endpoint::At(p));
    let hi = hi.map_or(Endpoint::PosInf, |&p| Endpoint::At(p));
    Some(Interval::new(lo, hi).expect("neighbours are ordered"))
}

fn type_machinery() -> Outcome {
    let start = Instant::now();
    let entries: Vec<QPoint> = sorted_by_value((0..7).map(QPoint::from_index).collect());
    let probes: Vec<QPoint> = (0..15).map(QPoint::from_index).collect();
    let (mut matrices, mut checked) = (0usize, 0usize);
    for n in 0..=3 {
        let rows = rows_of(&entries, n);
        let probe_tuples = tuples(&probes, n);
        for m in 0..=3 {
            // Every choice of rows, in every order.
            let choices = tuples_of_indices(rows.len(), m);
            for choice in choices {
                let matrix = Matrix::new(choice.iter().map(|&k| rows[k].clone()).collect(), n)
                    .map_err(|e| format!("matrix rejected: {e}"))?;
                matrices += 1;
                let cuts = sorted_by_value(choice.iter().flat_map(|&k| rows[k].clone()).collect());
                let types: BTreeSet<_> = all_types(&matrix).into_iter().collect();
                for t in &types {
                    let js = rows_avoiding_type(&matrix, t);
                    for (i, j) in js.iter().enumerate() {
                        let row_cells = SimplePartition::new(matrix.row(i).to_vec());
                        if !row_cells.intervals().contains(j) || t.parts().iter().any(|p| !apart(p, j)) {
                            return Err(format!("rows_avoiding_type row {i} gave {j}"));
                        }
                    }
                }
                // Classification only depends on the rows as a set.
                if choice.windows(2).any(|w| w[0] > w[1]) {
                    continue;
                }
                for xs in &probe_tuples {
                    let expected: Option<Vec<Interval>> = xs.iter().map(|&x| cell_around(&cuts, x)).collect();
                    let got = classify_type(&matrix, xs);
                    match (expected, got) {
                        (None, Err(_)) => {}
                        (Some(parts), Ok(t)) if t.parts() == parts.as_slice() && types.contains(&t) => {}
                        (e, g) => return Err(format!("tuple {xs:?}: expected {e:?}, got {g:?}")),
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{matrices} matrices, {checked} tuples, {:.2}s", start.elapsed().as_secs_f64()))
}

fn tuples_of_indices(k: usize, m: usize) -> Vec<Vec<usize>> {
    (0..m).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|t| {
                (0..k).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect()
    })
}

fn diagonalizes_by_hand(v: &MValuation, a0: &BTreeSet<u64>, a1: &BTreeSet<u64>) -> bool {
    v.r().iter().all(|r| r.iter().all(|x| a1.contains(&x.index())))
        && v.s().iter().all(|row| row.iter().any(|b| b.iter().all(|x| a0.contains(&x.index()))))
}

fn forge_build() -> (PartitionBuild, usize) {
    let reqs = requirement_suite();
    (forge_partition(&reqs, reqs.len(), 100_000), reqs.len())
}

fn fairness() -> Outcome {
    let start = Instant::now();
    let reqs = requirement_suite();
    let (build, _) = forge_build();
    check_build(&build).map_err(|e| format!("replay: {e}"))?;
    let (a0, a1) = (build.a0(), build.a1());
    if !a0.is_disjoint(a1) {
        return Err("A0 and A1 meet".into());
    }
    let mut covered: BTreeSet<u64> = BTreeSet::from([0]);
    let mut prev = None;
    for r in build.log() {
        if let Some(p) = prev {
            if r.bound_before != p {
                return Err(format!("stage {}: bound jumped", r.stage));
            }
        }
        prev = Some(r.bound_after);
        covered.extend(r.added0.iter().chain(&r.added1));
        if covered.len() as u64 != r.bound_after + 1 || covered.last() != Some(&r.bound_after) {
            return Err(format!("stage {}: [0, bound] not covered exactly", r.stage));
        }
        if let (Some(w), Some(k)) = (&r.witness, r.requirement) {
            if !reqs[k].predicate.holds(&w.valuation) {
                return Err(format!("stage {}: predicate fails", r.stage));
            }
            if !w.valuation.points().all(|x| x.index() > r.bound_before) {
                return Err(format!("stage {}: witness not above the bound", r.stage));
            }
            if !diagonalizes_by_hand(&w.valuation, a0, a1) {
                return Err(format!("stage {}: witness does not diagonalize", r.stage));
            }
        }
    }
    let cfg = AuditConfig { threshold: 8, bound: DepthBound::new(2, 1024).expect("valid bound") };
    let audit = fairness_audit(&reqs, &build, &[], &cfg);
    if !audit.pass {
        return Err("audit failed".into());
    }
    let acted = build.log().iter().filter(|r| r.witness.is_some()).count();
    within(Duration::from_secs(10), start, format!("{} requirements, {acted} acted", reqs.len()))
}

fn diag_reports(seed: u64) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    for n in 1..=3 {
        let opponents = dense_opponents(n, seed);
        let table = diag_run(n, &opponents, 10_000).map_err(|e| format!("n={n}: {e}"))?;
        let mut defeats = Vec::new();
        for e in 0..n {
            let emitted: BTreeSet<QPoint> = table.emissions(e).iter().map(|&(_, x)| x).collect();
            if emitted.len() < 4 * n + 1 {
                return Err(format!("n={n}: opponent {e} emitted only {}", emitted.len()));
            }
            for a in table.assignments() {
                if let Some((i0, i1)) = a.pairs[e] {
                    let ends = [i0.lo(), i0.hi(), i1.lo(), i1.hi()];
                    if !apart(&i0, &i1) || ends.iter().any(|p| p.point().is_none_or(|x| !emitted.contains(&x))) {
                        return Err(format!("n={n}: bad pair for opponent {e} at stage {}", a.stage));
                    }
                }
            }
            let reassigned = table.reassignments(e).len();
            if reassigned > n {
                return Err(format!("n={n}: opponent {e} reassigned {reassigned} times"));
            }
            let d = verify_defeat(&table, e).map_err(|err| format!("n={n}: {err}"))?;
            let both = d.samples.iter().map(|s| s.map(|x| table.color(x))).collect::<Vec<_>>();
            if !d.defeated || !d.colors_ok || both != [Some(0), Some(1)] {
                return Err(format!("n={n}: opponent {e} not defeated"));
            }
            defeats.push(Ok(d));
        }
        out.push(render(&diag_json(&table, &defeats)));
    }
    Ok(out)
}

fn diagonalization() -> Outcome {
    let start = Instant::now();
    diag_reports(7)?;
    within(Duration::from_secs(30), start, "n = 1, 2, 3".into())
}

fn determinism() -> Outcome {
    let same = |name: &str, a: Vec<String>, b: Vec<String>| -> Result<(), String> {
        if a == b {
            Ok(())
        } else {
            Err(format!("{name} reports differ"))
        }
    };
    same("selection", selection_reports(2)?, selection_reports(2)?)?;
    same("solver", solve_reports()?.0, solve_reports()?.0)?;
    let forge = || render(&forge_json(&forge_build().0));
    same("forge", vec![forge()], vec![forge()])?;
    same("diag", diag_reports(7)?, diag_reports(7)?)?;
    let v: Value = serde_json::from_str(&forge()).map_err(|e| e.to_string())?;
    if v.get("log").is_none() {
        return Err("forge report lacks a log".into());
    }
    Ok("selection, solver, forge, diag".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 partition algebra", partition_algebra),
        ("2 disjoint selection", disjoint_selection),
        ("3 counterexample coloring", counterexample),
        ("4 homogeneous-set solver", solver),
        ("5 type machinery", type_machinery),
        ("6 fairness forge and audit", fairness),
        ("7 diagonalization game", diagonalization),
        ("8 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
