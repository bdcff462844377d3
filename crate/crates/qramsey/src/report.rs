//! Machine-readable reports. Keys come out sorted, so equal results give
//! byte-identical output.

use qramsey_core::diagforge::{DefeatReport, DiagError, DiagTable};
use qramsey_core::disjsel::{IntervalFamily, Selection};
use qramsey_core::ersolver::{ErError, Solution, SolutionKind, Stall, TraceStep};
use qramsey_core::fairness::{AuditReport, PartitionBuild};
use qramsey_core::Interval;
use serde_json::{json, Value};

use crate::format::{families_to_dto, point_strings, IntervalDto, StageDto};

pub const SCHEMA: &str = "qramsey.report.v1";

pub fn envelope(command: &str, config: Value, status: &str, result: Value) -> Value {
    json!({
        "schema": SCHEMA,
        "command": command,
        "config": config,
        "status": status,
        "result": result,
    })
}

pub fn render(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("values always serialize");
    s.push('\n');
    s
}

fn interval(i: Interval) -> Value {
    serde_json::to_value(IntervalDto::from(i)).expect("plain struct")
}

fn opt_interval(i: Option<Interval>) -> Value {
    i.map_or(Value::Null, interval)
}

fn trace_json(trace: &[TraceStep]) -> Value {
    trace
        .iter()
        .map(|t| {
            json!({
                "point": t.point.to_string(),
                "rejected": t.rejected,
                "dense_in": opt_interval(t.dense_in),
                "cell": opt_interval(t.cell),
                "avoiding": opt_interval(t.avoiding),
                "avoided": t.avoided,
                "remaining": t.remaining,
            })
        })
        .collect()
}

pub fn solution_json(sol: &Solution) -> Value {
    let kind = match sol.kind {
        SolutionKind::Infinite0 => "Infinite0",
        SolutionKind::Dense1 => "Dense1",
    };
    json!({
        "kind": kind,
        "color": sol.kind.color(),
        "points": point_strings(&sol.points),
        "witness": opt_interval(sol.witness),
        "trace": trace_json(&sol.trace),
    })
}

fn stall_json(s: &Stall) -> Value {
    json!({
        "step": s.step,
        "remaining": s.remaining.len(),
        "witness": interval(s.witness),
        "trace": trace_json(&s.trace),
    })
}

/// The failure with every trace it carries.
pub fn solve_error_json(e: &ErError) -> Value {
    let mut v = match e {
        ErError::CaseIStall(s) => json!({ "case1": stall_json(s) }),
        ErError::NotPositive => json!({}),
        ErError::AvoidanceFailure { step, set, trace } => {
            json!({ "step": step, "set": set, "trace": trace_json(trace) })
        }
        ErError::EmptyCell { step, cell, trace } => {
            json!({ "step": step, "cell": interval(*cell), "trace": trace_json(trace) })
        }
        ErError::Unresolved { stall, case2 } => {
            json!({ "case1": stall_json(stall), "case2": solve_error_json(case2) })
        }
    };
    v["message"] = Value::String(e.to_string());
    v
}

pub fn selection_json(families: &[IntervalFamily], sel: &Selection) -> Value {
    let picks: Vec<Value> = sel
        .picks
        .iter()
        .map(|p| json!({ "family": p.family, "interval": interval(p.interval) }))
        .collect();
    let stages: Vec<Value> = sel
        .trace
        .iter()
        .map(|r| {
            json!({
                "stage": r.stage,
                "pick": { "family": r.pick.family, "interval": interval(r.pick.interval) },
                "live_before": r.live_before,
                "removed": r.removed,
                "live_after": r.live_after,
                "chosen": r.chosen,
            })
        })
        .collect();
    json!({
        "families": families_to_dto(families),
        "picks": picks,
        "trace": stages,
        "tie_break": "family, then left end, then right end",
    })
}

fn defeat_json(r: &Result<DefeatReport, DiagError>) -> Value {
    match r {
        Ok(d) => json!({
            "opponent": d.opponent,
            "pair": [interval(d.pair.0), interval(d.pair.1)],
            "stable_from": d.stable_from,
            "reassignments": d.reassignments,
            "counts": d.counts,
            "samples": d.samples.iter().map(|s| s.map(|x| x.to_string())).collect::<Vec<_>>(),
            "colors_ok": d.colors_ok,
            "defeated": d.defeated,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

pub fn diag_json(table: &DiagTable, defeats: &[Result<DefeatReport, DiagError>]) -> Value {
    let assignments: Vec<Value> = table
        .assignments()
        .iter()
        .map(|a| {
            let pairs: Vec<Value> = a
                .pairs
                .iter()
                .map(|p| p.map_or(Value::Null, |(i0, i1)| json!([interval(i0), interval(i1)])))
                .collect();
            json!({ "stage": a.stage, "trigger": a.trigger, "pairs": pairs })
        })
        .collect();
    let emitted: Vec<usize> = (0..table.opponents()).map(|e| table.emissions(e).len()).collect();
    json!({
        "level": table.level(),
        "horizon": table.horizon(),
        "default_color": table.default_color(),
        "emitted": emitted,
        "assignments": assignments,
        "defeat": defeats.iter().map(defeat_json).collect::<Vec<_>>(),
    })
}

pub fn forge_json(build: &PartitionBuild) -> Value {
    let log: Vec<StageDto> = build.log().iter().map(Into::into).collect();
    json!({
        "bound": build.bound(),
        "a0": build.a0(),
        "a1": build.a1(),
        "acted": build.log().iter().filter(|r| r.witness.is_some()).count(),
        "log": log,
    })
}

pub fn audit_json(report: &AuditReport) -> Value {
    let reqs: Vec<Value> = report
        .requirements
        .iter()
        .map(|r| {
            let checks = r.checks.as_ref().map_or(Value::Null, |c| {
                json!({
                    "predicate_holds": c.predicate_holds,
                    "of_type": c.of_type,
                    "above_bound": c.above_bound,
                    "diagonalizes": c.diagonalizes,
                })
            });
            json!({ "requirement": r.requirement, "acted": r.checks.is_some(), "checks": checks, "pass": r.pass })
        })
        .collect();
    let cands: Vec<Value> = report
        .candidates
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "size": c.size,
                "meets_a0": c.meets_a0.map(|x| x.to_string()),
                "meets_a1": c.meets_a1.map(|x| x.to_string()),
                "undecided": c.undecided,
                "inside_a0": c.inside_a0,
                "inside_a1": c.inside_a1,
                "dense_cell": opt_interval(c.dense_cell),
                "flagged": c.flagged,
            })
        })
        .collect();
    json!({
        "requirements": reqs,
        "invariants": match &report.invariants {
            Ok(()) => json!({ "ok": true }),
            Err(v) => json!({ "ok": false, "stage": v.stage, "what": v.what }),
        },
        "candidates": cands,
        "pass": report.pass,
    })
}
