//! JSON and text renderings of audit and suite reports.

use mixdisc::discriminant::MatrixTuple;
use mixdisc::harness::{Check, FunctionalAudit, Witness};
use mixdisc::matrix::PsdMatrix;
use mixdisc::suites::SuiteReport;
use mixdisc::{Rational, Scalar};
use serde_json::{json, Value};

use crate::io::{matrix_json, scalar_json, tuple_json};

fn tuple(t: &MatrixTuple<Rational>) -> Value {
    tuple_json(t.entries().iter().map(PsdMatrix::matrix))
}

fn matrix(m: &PsdMatrix<Rational>) -> Value {
    matrix_json(m.matrix())
}

/// Slots are reported 1-based.
pub fn witness_json(w: &Witness<Rational>) -> Value {
    match w {
        Witness::Negative { tuple: t, value } => json!({ "kind": "negative", "tuple": tuple(t), "value": scalar_json(value) }),
        Witness::NonAdditive { slot, a, b, rest, sum, parts } => json!({
            "kind": "non_additive",
            "slot": slot + 1,
            "a": matrix(a),
            "b": matrix(b),
            "rest": tuple(rest),
            "sum": scalar_json(sum),
            "parts": scalar_json(parts),
        }),
        Witness::NonzeroAtZero { slot, tuple: t, value } => {
            json!({ "kind": "nonzero_at_zero", "slot": slot + 1, "tuple": tuple(t), "value": scalar_json(value) })
        }
        Witness::NonMonotone { slot, a, delta, rest, lower, upper } => json!({
            "kind": "non_monotone",
            "slot": slot + 1,
            "a": matrix(a),
            "delta": matrix(delta),
            "rest": tuple(rest),
            "lower": scalar_json(lower),
            "upper": scalar_json(upper),
        }),
        Witness::NonVanishing { slots, tuple: t, value } => json!({
            "kind": "non_vanishing",
            "slots": [slots.0 + 1, slots.1 + 1],
            "tuple": tuple(t),
            "value": scalar_json(value),
        }),
        Witness::NotProportional { tuple: t, value, expected } => json!({
            "kind": "not_proportional",
            "tuple": tuple(t),
            "value": scalar_json(value),
            "expected": scalar_json(expected),
        }),
    }
}

fn check_json(c: &Check<Rational>) -> Value {
    json!({
        "passed": c.passed,
        "checked": c.checked,
        "witness": c.witness.as_ref().map_or(Value::Null, witness_json),
    })
}

pub fn audit_json(r: &FunctionalAudit<Rational>, reverified: bool) -> Value {
    json!({
        "functional": r.name,
        "n": r.n,
        "trials": r.trials,
        "seed": r.seed,
        "hypotheses_hold": r.hypotheses_hold(),
        "nonnegative": check_json(&r.nonnegative),
        "additive_per_slot": r.additive_per_slot.iter().map(check_json).collect::<Vec<_>>(),
        "zero_argument": check_json(&r.zero_argument),
        "vanishing_on_proportional_rank_one": check_json(&r.vanishing_on_proportional_rank_one),
        "monotone": check_json(&r.monotone),
        "bounded_by_md": r.bounded_by_md,
        "max_ratio": r.max_ratio.as_ref().map_or(Value::Null, scalar_json),
        "estimated_a": r.estimated_a.as_ref().map_or(Value::Null, scalar_json),
        "proportionality": r.proportionality.as_ref().map_or(Value::Null, |p| json!({
            "passed": p.passed,
            "worst_deviation": scalar_json(&p.worst_deviation),
            "witness": p.witness.as_ref().map_or(Value::Null, witness_json),
        })),
        "witnesses_reverified": reverified,
    })
}

pub fn suites_json(reports: &[SuiteReport], seed: u64) -> Value {
    let suites: Vec<Value> = reports
        .iter()
        .map(|s| {
            json!({
                "suite": s.suite,
                "passed": s.passed(),
                "checks": s.checks.iter().map(|c| json!({
                    "name": c.name,
                    "cases": c.cases,
                    "passed": c.passed(),
                    "failures": c.failures.iter().map(|f| json!({
                        "case": f.case,
                        "message": f.message,
                        "instance": tuple_json(&f.matrices),
                        "lambdas": f.lambdas.iter().map(Scalar::to_repr).collect::<Vec<_>>(),
                    })).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "passed": reports.iter().all(SuiteReport::passed), "seed": seed, "suites": suites })
}

pub fn suites_text(reports: &[SuiteReport]) -> Vec<String> {
    let mut lines = Vec::new();
    for s in reports {
        for c in &s.checks {
            let verdict = if c.passed() { "PASS" } else { "FAIL" };
            lines.push(format!("{verdict} {}/{}: {} cases, {} failures", s.suite, c.name, c.cases, c.failures.len()));
            for f in c.failures.iter().take(3) {
                lines.push(format!("  case {}: {}", f.case, f.message));
            }
        }
    }
    let overall = if reports.iter().all(SuiteReport::passed) { "PASS" } else { "FAIL" };
    lines.push(format!("{overall} overall"));
    lines
}
