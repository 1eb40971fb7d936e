//! Rendering of results as JSON.
//!
//! Exact values are strings in the amplitude literal grammar, so they parse
//! back with [`crate::parse_amplitude`]. Float approximations sit next to
//! them under `approx` and are for reading only. Objects are key-sorted.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::classical::{ClassicalDist, ClassicalOutcome};
use crate::harness::{
    ConjectureReport, Dist, Observed, SimAccuracyReport, SuhdIterationRecord, UniversalityReport,
};
use crate::machine::{MachineDesc, Tape};
use crate::quantum::{OutcomeDist, WellFormedReport};
use crate::{CycQ8, Rat, RealQ2};

/// Lossy conversion for display.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn approx(v: Result<f64, crate::amplitude::RangeError>) -> Value {
    v.ok().and_then(|f| serde_json::Number::from_f64(f).map(Value::Number)).unwrap_or(Value::Null)
}

pub fn real(r: &RealQ2) -> Value {
    json!({ "exact": r.to_string(), "approx": approx(r.to_f64()) })
}

pub fn rational(r: &Rat) -> Value {
    json!({ "exact": r.to_string(), "approx": approx(Ok(rat_to_f64(r))) })
}

pub fn amplitude(a: &CycQ8) -> Value {
    let (re, im) = match a.to_complex64() {
        Ok(c) => (approx(Ok(c.re)), approx(Ok(c.im))),
        Err(_) => (Value::Null, Value::Null),
    };
    json!({ "exact": a.to_string(), "approx": { "re": re, "im": im } })
}

pub fn machine(m: &MachineDesc) -> Value {
    json!({ "name": m.name(), "kind": m.kind().keyword(), "states": m.states().len() })
}

pub fn tape_dist(d: &BTreeMap<Tape, RealQ2>) -> Value {
    Value::Object(d.iter().map(|(t, p)| (t.to_string(), real(p))).collect())
}

pub fn observed_dist(d: &Dist<Observed>) -> Value {
    Value::Object(d.iter().map(|(k, p)| (k.to_string(), real(p))).collect())
}

pub fn wellformed(r: &WellFormedReport, m: &MachineDesc) -> Value {
    let src = |(q, s): (crate::machine::StateId, crate::machine::Symbol)| json!([m.state_name(q), s.to_string()]);
    let violations: Vec<Value> = r
        .violations
        .iter()
        .map(|v| {
            json!({
                "condition": v.condition.id(),
                "description": v.condition.description(),
                "sources": [src(v.sources.0), src(v.sources.1)],
                "writes": v.writes.map(|(a, b)| json!([a.to_string(), b.to_string()])),
                "residual": amplitude(&v.residual),
            })
        })
        .collect();
    json!({ "verdict": r.verdict(), "violations": violations })
}

pub fn classical_outcome(o: &ClassicalOutcome) -> Value {
    json!({ "status": o.status.as_str(), "tape": o.tape.to_string(), "steps": o.steps, "head": o.head })
}

pub fn classical_dist(d: &ClassicalDist) -> Value {
    let entries: Vec<Value> = d
        .dist
        .iter()
        .map(|((s, t), p)| json!({ "status": s.as_str(), "tape": t.to_string(), "probability": rational(p) }))
        .collect();
    json!({
        "horizon": d.horizon,
        "distribution": entries,
        "halted_mass": rational(&d.halted_mass()),
        "peak_support": d.peak_support,
    })
}

pub fn outcome_dist(d: &OutcomeDist, schedule: &[u64]) -> Value {
    let events: Vec<Value> = d
        .events
        .iter()
        .map(|((step, t), p)| json!({ "step": step, "tape": t.to_string(), "probability": real(p) }))
        .collect();
    json!({
        "horizon": d.horizon,
        "schedule": schedule_value(schedule),
        "events": events,
        "outputs": tape_dist(&d.outputs()),
        "residual": real(&d.residual),
        "peak_support": d.peak_support,
    })
}

/// `1, 2, ..., n` is shown as `"every step to n"`.
fn schedule_value(steps: &[u64]) -> Value {
    if !steps.is_empty() && steps.iter().enumerate().all(|(i, &k)| k == i as u64 + 1) {
        json!(format!("every step to {}", steps.len()))
    } else {
        json!(steps)
    }
}

pub fn accuracy(r: &SimAccuracyReport) -> Value {
    json!({ "tv": real(&r.tv), "epsilon": rational(&r.epsilon), "within_budget": r.within_budget })
}

pub fn suhd_record(r: &SuhdIterationRecord) -> Value {
    json!({
        "outer_T": r.outer_t,
        "steps_executed": r.steps_executed,
        "accuracy": rational(&r.accuracy),
        "observed": r.observed,
        "halt_prob_at_signal": real(&r.halt_prob_at_signal),
        "read": r.read.as_ref().map(tape_dist),
        "reset_fidelity": real(&r.reset_fidelity),
        "state_restored": r.state_restored,
    })
}

pub fn universality(r: &UniversalityReport) -> Value {
    let witnesses: Vec<Value> = r
        .discrepancies
        .iter()
        .map(|w| {
            json!({
                "machine": w.machine,
                "input": w.input.to_string(),
                "universal": match &w.universal {
                    Ok(d) => observed_dist(d),
                    Err(e) => json!({ "error": e.to_string() }),
                },
                "direct": observed_dist(&w.direct),
            })
        })
        .collect();
    json!({
        "kind": r.kind.keyword(),
        "horizon": r.horizon,
        "checked": r.checked,
        "passed": r.passed(),
        "scope": UniversalityReport::SCOPE,
        "discrepancies": witnesses,
    })
}

pub fn conjecture(r: &ConjectureReport) -> Value {
    let rows: Vec<Value> = r
        .rows
        .iter()
        .map(|row| {
            let probes: Vec<Value> = row
                .probes
                .iter()
                .map(|p| json!({ "outer_T": p.outer_t, "halt_prob": real(&p.halt_prob), "fidelity": real(&p.fidelity) }))
                .collect();
            json!({
                "machine": row.machine,
                "reversible_unobserved": row.reversible_unobserved,
                "irreversible_under_observation": row.irreversible_under_observation,
                "matches_expectation": row.matches_expectation,
                "probes": probes,
            })
        })
        .collect();
    json!({ "header": ConjectureReport::HEADER, "consistent": r.consistent(), "rows": rows })
}

/// Pretty JSON with a trailing newline. `serde_json` keeps object keys
/// sorted, so equal values always render identically.
pub fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are serializable");
    s.push('\n');
    s
}

/// A flat `key: value` rendering for terminals.
pub fn to_plain_text(v: &Value) -> String {
    let mut out = String::new();
    flatten("", v, &mut out);
    out
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) if is_exact_pair(map) => {
            out.push_str(&format!("{prefix}: {} (~{})\n", map["exact"].as_str().unwrap_or(""), short(&map["approx"])));
        }
        Value::Object(map) => {
            for (k, x) in map {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, x, out);
            }
        }
        Value::Array(xs) if xs.is_empty() => out.push_str(&format!("{prefix}: []\n")),
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix}: {s:?}\n")),
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}

fn is_exact_pair(map: &Map<String, Value>) -> bool {
    map.len() == 2 && map.contains_key("exact") && map.contains_key("approx")
}

fn short(v: &Value) -> String {
    match v {
        Value::Number(n) => format!("{:.6}", n.as_f64().unwrap_or(f64::NAN)),
        Value::Object(m) => format!("{} + {}i", short(&m["re"]), short(&m["im"])),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_amplitude;

    #[test]
    fn exact_strings_round_trip() {
        for s in ["1/2", "3 - 2*r2", "1/2 - 1/2*i", "0", "-i*r2"] {
            let a = parse_amplitude(s).unwrap();
            let v = amplitude(&a);
            assert_eq!(parse_amplitude(v["exact"].as_str().unwrap()).unwrap(), a);
        }
        let r = parse_amplitude("3 - 2*r2").unwrap().as_real().unwrap();
        let v = real(&r);
        assert_eq!(v["exact"], "3 - 2*r2");
        assert!((v["approx"].as_f64().unwrap() - 0.171572875).abs() < 1e-6);
    }

    #[test]
    fn keys_are_sorted() {
        let v = json!({ "b": 1, "a": 2 });
        assert!(to_json_text(&v).find("\"a\"").unwrap() < to_json_text(&v).find("\"b\"").unwrap());
    }

    #[test]
    fn plain_text() {
        let r = parse_amplitude("1/2").unwrap().as_real().unwrap();
        let t = to_plain_text(&json!({ "p": real(&r), "xs": [1, 2] }));
        assert_eq!(t, "p: 1/2 (~0.500000)\nxs[0]: 1\nxs[1]: 2\n");
    }
}
