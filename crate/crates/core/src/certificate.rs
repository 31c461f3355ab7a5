//! Machine-readable run certificates.
//!
//! A certificate records what was run (pipeline, SHA-256 of every input
//! file), the bound report, the verifier verdict, a trace summary, and the
//! solution itself, so `verify` can re-check it without the trace. Keys are
//! sorted; wall-clock time is only present when asked for, which keeps
//! certificates byte-identical across runs.

use crate::cacq::CacqSolution;
use crate::io::{solution_to_json, Solution, VERSION};
use crate::model::{FlowInstance, HypergraphInstance, Instance, MultiFlow};
use crate::rational::format;
use crate::shm::ShmSolution;
use crate::smf::FlowSolution;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunCertificate {
    pub pipeline: String,
    /// Input name (`instance`, `solution`) to digest.
    pub inputs: Vec<(String, String)>,
    pub passed: bool,
    pub bounds: Value,
    pub verdict: Value,
    pub trace: Value,
    pub solution: Value,
    pub wall_clock_ms: Option<u128>,
}

impl RunCertificate {
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("kind".into(), json!("certificate"));
        m.insert("version".into(), json!(VERSION));
        m.insert("pipeline".into(), json!(self.pipeline));
        let digests: Map<String, Value> = self
            .inputs
            .iter()
            .map(|(k, d)| (k.clone(), json!(d)))
            .collect();
        m.insert("input_sha256".into(), Value::Object(digests));
        m.insert("passed".into(), json!(self.passed));
        if !self.bounds.is_null() {
            m.insert("bounds".into(), self.bounds.clone());
        }
        m.insert("verdict".into(), self.verdict.clone());
        if !self.trace.is_null() {
            m.insert("trace".into(), self.trace.clone());
        }
        m.insert("solution".into(), self.solution.clone());
        if let Some(ms) = self.wall_clock_ms {
            m.insert("wall_clock_ms".into(), json!(ms as u64));
        }
        Value::Object(m)
    }

    /// A few human-readable lines.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "pipeline: {}\nresult: {}\n",
            self.pipeline,
            if self.passed { "pass" } else { "FAIL" }
        );
        for key in [
            "ell",
            "max_deviation",
            "sum_deviation",
            "max_commodity_drift",
            "aggregate_drift",
        ] {
            if let Some(v) = self.bounds.get(key) {
                out += &format!("{key}: {}\n", plain(v));
            }
        }
        if let Value::Object(m) = &self.verdict {
            for (key, v) in m {
                if let Value::Array(items) = v {
                    if !items.is_empty() {
                        out += &format!("{key}: {}\n", items.len());
                    }
                }
            }
        }
        if let Some(p) = self.trace.get("pivots") {
            out += &format!("pivots: {p}\n");
        }
        if let Some(r) = self.trace.get("rounding_iterations") {
            out += &format!("rounding iterations: {r}\n");
        }
        if let Some(ms) = self.wall_clock_ms {
            out += &format!("wall clock: {ms} ms\n");
        }
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types always serialize")
}

fn edge_values(ids: impl Iterator<Item = String>, xs: &[crate::rational::Rational]) -> Value {
    Value::Object(
        ids.zip(xs)
            .filter(|(_, x)| !num_traits::Zero::is_zero(*x))
            .map(|(id, x)| (id, json!(format(x))))
            .collect(),
    )
}

pub fn shm_certificate(
    inst: &HypergraphInstance,
    digest: String,
    sol: &ShmSolution,
    detailed: bool,
) -> RunCertificate {
    let b = &sol.bounds;
    let bounds = json!({
        "ell": b.ell,
        "max_deviation": b.max_deviation,
        "max_deviation_limit": b.ell.saturating_sub(1),
        "max_deviation_ok": b.max_deviation_ok,
        "sum_deviation": b.sum_deviation,
        "sum_deviation_limit": b.ell.saturating_sub(1),
        "sum_deviation_ok": b.sum_deviation_ok,
        "stripped_load_deviation": b.stripped_load_deviation,
        "capacities": to_value(&sol.revision.entries),
    });
    let mut trace = json!({
        "pivots": sol.pivots,
        "rounding_iterations": sol.steps.len(),
    });
    if detailed {
        trace["steps"] = to_value(&sol.steps);
        let ids = inst.edges.iter().map(|e| e.id.clone());
        trace["fractional"] = edge_values(ids, &sol.fractional[..inst.edges.len()]);
    }
    let instance = Instance::Shm(inst.clone());
    let solution = Solution::Shm {
        matching: sol.matching.clone(),
        capacity: sol.revision.revised(),
    };
    RunCertificate {
        pipeline: "shm".into(),
        inputs: vec![("instance".into(), digest)],
        passed: sol.passes(),
        bounds,
        verdict: to_value(&sol.verdict),
        trace,
        solution: solution_to_json(&solution, &instance),
        wall_clock_ms: None,
    }
}

pub fn cacq_certificate(digest: String, sol: &CacqSolution, detailed: bool) -> RunCertificate {
    let b = &sol.bounds;
    let bounds = json!({
        "ell": b.ell,
        "max_deviation": b.max_deviation,
        "max_deviation_limit": (2 * b.ell.max(1)).saturating_sub(1),
        "max_deviation_ok": b.max_deviation_ok,
        "sum_deviation": sol.revision.sum_deviation(),
        "sets": to_value(&sol.sets),
        "pinned_students": b.pinned_students,
        "pinned_unmatched": b.pinned_unmatched,
    });
    let mut trace = json!({
        "pivots": sol.pivots,
        "rounding_iterations": sol.steps.len(),
    });
    if detailed {
        trace["steps"] = to_value(&sol.steps);
        let ids = sol.instance.edges.iter().map(|e| e.id.clone());
        trace["fractional"] = edge_values(ids, &sol.fractional);
    }
    let instance = Instance::Cacq(sol.instance.clone());
    let solution = Solution::Cacq {
        matching: sol.matching.clone(),
        quota: sol.revision.revised(),
    };
    RunCertificate {
        pipeline: "cacq".into(),
        inputs: vec![("instance".into(), digest)],
        passed: sol.passes(),
        bounds,
        verdict: to_value(&sol.verdict),
        trace,
        solution: solution_to_json(&solution, &instance),
        wall_clock_ms: None,
    }
}

pub fn smf_certificate(
    inst: &FlowInstance,
    f: &MultiFlow,
    digest: String,
    sol: &FlowSolution,
    detailed: bool,
) -> RunCertificate {
    let b = &sol.bounds;
    let arcs: Vec<Value> = inst
        .arcs
        .iter()
        .enumerate()
        .map(|(a, arc)| {
            json!({
                "arc": arc.id,
                "capacity": arc.capacity,
                "revised": sol.capacities.aggregate[a],
                "fractional_load": format(&f.total_on(a)),
                "rounded_load": format(&sol.rounded.total_on(a)),
            })
        })
        .collect();
    let mut bounds = to_value(b);
    bounds["max_deviation_limit"] = json!(b.commodities.saturating_sub(1));
    bounds["arcs"] = Value::Array(arcs);
    bounds["commodities"] = to_value(&sol.drift);
    let mut trace = json!({ "rounding_iterations": sol.steps.len() });
    if detailed {
        trace["steps"] = to_value(&sol.steps);
    }
    let instance = Instance::Smf(inst.clone());
    let solution = Solution::Smf {
        flow: sol.rounded.clone(),
        capacities: sol.capacities.clone(),
    };
    RunCertificate {
        pipeline: format!("smf-{}", mode_name(b.mode)),
        inputs: vec![("instance".into(), digest)],
        passed: sol.passes(),
        bounds,
        verdict: to_value(&sol.verdict),
        trace,
        solution: solution_to_json(&solution, &instance),
        wall_clock_ms: None,
    }
}

fn mode_name(m: crate::smf::RoundingMode) -> &'static str {
    match m {
        crate::smf::RoundingMode::Default => "default",
        crate::smf::RoundingMode::Balanced => "balanced",
    }
}

/// Re-checks a solution against its instance; no bound report, since the
/// original capacities are the instance's.
pub fn verify_certificate(
    inst: &Instance,
    solution: &Solution,
    inputs: Vec<(String, String)>,
) -> RunCertificate {
    let (passed, verdict) = match (inst, solution) {
        (Instance::Shm(i), Solution::Shm { matching, capacity }) => {
            let v = crate::shm::verify_shm(i, capacity, matching);
            (v.passes(), to_value(&v))
        }
        (Instance::Cacq(i), Solution::Cacq { matching, quota }) => {
            let v = crate::cacq::verify_cacq(i, quota, matching);
            (v.passes(), to_value(&v))
        }
        (Instance::Smf(i), Solution::Smf { flow, capacities }) => {
            let v = crate::smf::verify_flow_under(i, capacities, flow);
            (v.passes(), to_value(&v))
        }
        _ => panic!("solution and instance kinds differ"),
    };
    let bounds = revision_report(inst, solution);
    RunCertificate {
        pipeline: format!("verify-{}", inst.kind()),
        inputs,
        passed,
        bounds,
        verdict,
        trace: Value::Null,
        solution: solution_to_json(solution, inst),
        wall_clock_ms: None,
    }
}

fn revision_report(inst: &Instance, solution: &Solution) -> Value {
    let (original, revised): (Vec<u64>, Vec<u64>) = match (inst, solution) {
        (Instance::Shm(i), Solution::Shm { capacity, .. }) => {
            (i.capacity.clone(), capacity.clone())
        }
        (Instance::Cacq(i), Solution::Cacq { quota, .. }) => {
            (i.sets.iter().map(|s| s.quota).collect(), quota.clone())
        }
        (Instance::Smf(i), Solution::Smf { capacities, .. }) => (
            i.arcs.iter().map(|a| a.capacity).collect(),
            capacities.aggregate.clone(),
        ),
        _ => return Value::Null,
    };
    let max = original
        .iter()
        .zip(&revised)
        .map(|(&o, &r)| o.abs_diff(r))
        .max()
        .unwrap_or(0);
    let sum: i64 = original
        .iter()
        .zip(&revised)
        .map(|(&o, &r)| r as i64 - o as i64)
        .sum();
    json!({ "max_deviation": max, "sum_deviation": sum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::triangle;
    use crate::shm::solve_shm;

    #[test]
    fn digest_is_sha256() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn triangle_certificate_reports_unit_deviation() {
        let inst = triangle();
        let sol = solve_shm(&inst).unwrap();
        let cert = shm_certificate(&inst, "x".into(), &sol, true).to_json();
        assert_eq!(cert["passed"], json!(true));
        assert_eq!(cert["bounds"]["max_deviation"], json!(1));
        assert_eq!(cert["bounds"]["sum_deviation"], json!(1));
        assert!(cert.get("wall_clock_ms").is_none());
    }

    #[test]
    fn verify_reproduces_solve_verdict() {
        let inst = triangle();
        let sol = solve_shm(&inst).unwrap();
        let cert = shm_certificate(&inst, "x".into(), &sol, false).to_json();
        let text = cert.to_string();
        let instance = Instance::Shm(inst);
        let parsed = crate::io::parse_solution(&text, &instance).unwrap();
        let again = verify_certificate(&instance, &parsed, vec![]);
        assert!(again.passed);
        assert_eq!(again.verdict, cert["verdict"]);
    }
}
