//! JSON file formats.
//!
//! Every document is an object `{"kind": ..., "version": 1, ...}`. Entities
//! are referenced by id, preference lists are arrays of tie-groups (arrays of
//! ids, best group first), and numbers are JSON integers, exact decimals, or
//! `"p/q"` strings. Unknown fields are rejected.
//!
//! Instance kinds: `shm`, `cacq`, `smf` (an `smf` instance may carry a
//! `flow`). Solution kinds: `shm-solution`, `cacq-solution`, `smf-solution`.
//! A run certificate (`kind: "certificate"`) embeds its solution and is
//! accepted wherever a solution is expected.

use crate::error::{Error, Result};
use crate::model::{
    AdmissionEdge, Arc, CacqInstance, College, CollegeSet, Commodity, FlowInstance, Hyperedge,
    HypergraphInstance, Instance, MultiFlow, Violation,
};
use crate::order::WeakOrder;
use crate::rational::{format, serde_rational, Rational};
use crate::smf::Capacities;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::{BTreeMap, HashMap};

pub const VERSION: u64 = 1;

type Groups = Vec<Vec<String>>;

/// A JSON number or `"p/q"` string, kept exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Num(#[serde(with = "serde_rational")] pub Rational);

impl From<u64> for Num {
    fn from(v: u64) -> Self {
        Num(Rational::from_integer(v.into()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShmDoc {
    kind: String,
    version: u64,
    vertices: Vec<ShmVertex>,
    edges: Vec<ShmEdge>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShmVertex {
    id: String,
    capacity: Num,
    preferences: Groups,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShmEdge {
    id: String,
    members: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CacqDoc {
    kind: String,
    version: u64,
    students: Vec<CacqStudent>,
    colleges: Vec<CacqCollege>,
    edges: Vec<CacqEdge>,
    #[serde(default)]
    sets: Vec<CacqSet>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CacqStudent {
    id: String,
    /// Over edge ids.
    preferences: Groups,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CacqCollege {
    id: String,
    quota: Num,
    /// Over student ids.
    preferences: Groups,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CacqEdge {
    id: String,
    student: String,
    college: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CacqSet {
    id: String,
    colleges: Vec<String>,
    quota: Num,
    master: Groups,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SmfDoc {
    kind: String,
    version: u64,
    vertices: Vec<SmfVertex>,
    commodities: Vec<SmfCommodity>,
    arcs: Vec<SmfArc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    flow: Option<FlowMap>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SmfVertex {
    id: String,
    /// Commodity id to a ranking of the incident arc ids.
    preferences: BTreeMap<String, Groups>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SmfCommodity {
    id: String,
    source: String,
    sink: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SmfArc {
    id: String,
    tail: String,
    head: String,
    capacity: Num,
    commodity_capacity: BTreeMap<String, Num>,
    /// Over commodity ids.
    preferences: Groups,
}

/// Commodity id to arc id to value; absent entries are zero.
type FlowMap = BTreeMap<String, BTreeMap<String, Num>>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShmSolutionDoc {
    kind: String,
    version: u64,
    matching: Vec<String>,
    /// Revised vertex capacities; vertices left out keep their original.
    #[serde(default)]
    capacity: BTreeMap<String, Num>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CacqSolutionDoc {
    kind: String,
    version: u64,
    matching: Vec<String>,
    /// Revised set quotas keyed by set id (a singleton set has its
    /// college's id); sets left out keep their original.
    #[serde(default)]
    quota: BTreeMap<String, Num>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SmfSolutionDoc {
    kind: String,
    version: u64,
    flow: FlowMap,
    #[serde(default)]
    capacity: BTreeMap<String, Num>,
    #[serde(default)]
    commodity_capacity: BTreeMap<String, BTreeMap<String, Num>>,
}

/// A matching or flow together with the capacities it is checked under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Shm {
        matching: Vec<bool>,
        capacity: Vec<u64>,
    },
    /// Quotas are indexed by the sets of the normalized instance.
    Cacq {
        matching: Vec<bool>,
        quota: Vec<u64>,
    },
    Smf {
        flow: MultiFlow,
        capacities: Capacities,
    },
}

impl Solution {
    pub fn kind(&self) -> &'static str {
        match self {
            Solution::Shm { .. } => "shm",
            Solution::Cacq { .. } => "cacq",
            Solution::Smf { .. } => "smf",
        }
    }
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn kind_of(doc: &Value) -> Result<&str> {
    doc.get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse("document has no string `kind` field".into()))
}

fn decode<T: DeserializeOwned>(doc: Value) -> Result<T> {
    if let Some(v) = doc.get("version") {
        if v.as_u64() != Some(VERSION) {
            return Err(Error::Parse(format!(
                "unsupported version {v}, expected {VERSION}"
            )));
        }
    }
    serde_json::from_value(doc).map_err(|e| Error::Parse(e.to_string()))
}

/// Id lookup that records dangling references instead of failing early.
struct Names<'a> {
    what: &'static str,
    index: HashMap<&'a str, usize>,
}

impl<'a> Names<'a> {
    fn new(what: &'static str, ids: impl IntoIterator<Item = &'a str>) -> Self {
        let mut index = HashMap::new();
        for (i, id) in ids.into_iter().enumerate() {
            index.entry(id).or_insert(i);
        }
        Names { what, index }
    }

    fn get(&self, id: &str, entity: &str, out: &mut Vec<Violation>) -> Option<usize> {
        let found = self.index.get(id).copied();
        if found.is_none() {
            out.push(Violation::new(
                entity,
                "dangling-reference",
                format!("unknown {} `{id}`", self.what),
            ));
        }
        found
    }

    fn order(&self, groups: &Groups, entity: &str, out: &mut Vec<Violation>) -> WeakOrder {
        WeakOrder::new(
            groups
                .iter()
                .map(|g| {
                    g.iter()
                        .filter_map(|id| self.get(id, entity, out))
                        .collect()
                })
                .collect(),
        )
    }
}

fn count(n: &Num, entity: &str, field: &str, out: &mut Vec<Violation>) -> u64 {
    let x = &n.0;
    if !x.is_integer() || x.is_negative() {
        out.push(Violation::new(
            entity,
            "integral-capacity",
            format!("{field} must be a nonnegative integer, got {}", format(x)),
        ));
        return 0;
    }
    x.to_integer().to_u64().unwrap_or_else(|| {
        out.push(Violation::new(
            entity,
            "integral-capacity",
            format!("{field} is too large"),
        ));
        0
    })
}

fn finish<T>(
    value: T,
    mut found: Vec<Violation>,
    validate: impl Fn(&T) -> Vec<Violation>,
) -> Result<T> {
    if found.is_empty() {
        found = validate(&value);
    }
    if found.is_empty() {
        Ok(value)
    } else {
        Err(Error::Invalid(found))
    }
}

/// Parses and validates an instance document. For `smf` the optional flow is
/// returned alongside.
pub fn parse_instance(text: &str) -> Result<(Instance, Option<MultiFlow>)> {
    let doc = parse_json(text)?;
    match kind_of(&doc)? {
        "shm" => Ok((Instance::Shm(shm_from_doc(decode(doc)?)?), None)),
        "cacq" => Ok((Instance::Cacq(cacq_from_doc(decode(doc)?)?), None)),
        "smf" => {
            let d: SmfDoc = decode(doc)?;
            let flow_map = d.flow.clone();
            let inst = smf_from_doc(d)?;
            let flow = flow_map.map(|m| flow_from_map(&inst, &m)).transpose()?;
            Ok((Instance::Smf(inst), flow))
        }
        other => Err(Error::Parse(format!("`{other}` is not an instance kind"))),
    }
}

fn shm_from_doc(d: ShmDoc) -> Result<HypergraphInstance> {
    let mut out = Vec::new();
    let vnames = Names::new("vertex", d.vertices.iter().map(|v| v.id.as_str()));
    let enames = Names::new("edge", d.edges.iter().map(|e| e.id.as_str()));
    let edges = d
        .edges
        .iter()
        .map(|e| Hyperedge {
            id: e.id.clone(),
            members: e
                .members
                .iter()
                .filter_map(|m| vnames.get(m, &format!("edge {}", e.id), &mut out))
                .collect(),
        })
        .collect();
    let mut capacity = Vec::new();
    let mut preferences = Vec::new();
    for v in &d.vertices {
        let entity = format!("vertex {}", v.id);
        capacity.push(count(&v.capacity, &entity, "capacity", &mut out));
        preferences.push(enames.order(&v.preferences, &entity, &mut out));
    }
    let inst = HypergraphInstance {
        vertices: d.vertices.iter().map(|v| v.id.clone()).collect(),
        edges,
        capacity,
        preferences,
    };
    finish(inst, out, HypergraphInstance::validate)
}

fn cacq_from_doc(d: CacqDoc) -> Result<CacqInstance> {
    let mut out = Vec::new();
    let snames = Names::new("student", d.students.iter().map(|s| s.id.as_str()));
    let cnames = Names::new("college", d.colleges.iter().map(|c| c.id.as_str()));
    let enames = Names::new("edge", d.edges.iter().map(|e| e.id.as_str()));
    let mut edges = Vec::new();
    for e in &d.edges {
        let entity = format!("edge {}", e.id);
        let student = snames.get(&e.student, &entity, &mut out);
        let college = cnames.get(&e.college, &entity, &mut out);
        if let (Some(student), Some(college)) = (student, college) {
            edges.push(AdmissionEdge {
                id: e.id.clone(),
                student,
                college,
            });
        }
    }
    let colleges = d
        .colleges
        .iter()
        .map(|c| {
            let entity = format!("college {}", c.id);
            College {
                id: c.id.clone(),
                quota: count(&c.quota, &entity, "quota", &mut out),
                preferences: snames.order(&c.preferences, &entity, &mut out),
            }
        })
        .collect();
    let sets = d
        .sets
        .iter()
        .map(|s| {
            let entity = format!("set {}", s.id);
            CollegeSet {
                id: s.id.clone(),
                colleges: s
                    .colleges
                    .iter()
                    .filter_map(|c| cnames.get(c, &entity, &mut out))
                    .collect(),
                quota: count(&s.quota, &entity, "quota", &mut out),
                master: snames.order(&s.master, &entity, &mut out),
            }
        })
        .collect();
    let student_preferences = d
        .students
        .iter()
        .map(|s| enames.order(&s.preferences, &format!("student {}", s.id), &mut out))
        .collect();
    let inst = CacqInstance {
        students: d.students.iter().map(|s| s.id.clone()).collect(),
        colleges,
        edges,
        sets,
        student_preferences,
    };
    finish(inst, out, CacqInstance::validate)
}

fn smf_from_doc(d: SmfDoc) -> Result<FlowInstance> {
    let mut out = Vec::new();
    let vnames = Names::new("vertex", d.vertices.iter().map(|v| v.id.as_str()));
    let knames = Names::new("commodity", d.commodities.iter().map(|k| k.id.as_str()));
    let anames = Names::new("arc", d.arcs.iter().map(|a| a.id.as_str()));
    let k = d.commodities.len();
    let commodities = d
        .commodities
        .iter()
        .map(|c| {
            let entity = format!("commodity {}", c.id);
            Commodity {
                id: c.id.clone(),
                source: vnames.get(&c.source, &entity, &mut out).unwrap_or(0),
                sink: vnames.get(&c.sink, &entity, &mut out).unwrap_or(0),
            }
        })
        .collect();
    let mut arcs = Vec::new();
    for a in &d.arcs {
        let entity = format!("arc {}", a.id);
        let tail = vnames.get(&a.tail, &entity, &mut out).unwrap_or(0);
        let head = vnames.get(&a.head, &entity, &mut out).unwrap_or(0);
        let mut commodity_capacity = vec![0; k];
        for (cid, n) in &a.commodity_capacity {
            if let Some(j) = knames.get(cid, &entity, &mut out) {
                commodity_capacity[j] = count(n, &entity, "commodity capacity", &mut out);
            }
        }
        for c in &d.commodities {
            if !a.commodity_capacity.contains_key(&c.id) {
                out.push(Violation::new(
                    &entity,
                    "missing-capacity",
                    format!("no capacity for commodity {}", c.id),
                ));
            }
        }
        arcs.push(Arc {
            id: a.id.clone(),
            tail,
            head,
            capacity: count(&a.capacity, &entity, "capacity", &mut out),
            commodity_capacity,
            preferences: knames.order(&a.preferences, &entity, &mut out),
        });
    }
    let mut vertex_preferences = Vec::new();
    for v in &d.vertices {
        let entity = format!("vertex {}", v.id);
        let mut per = vec![WeakOrder::default(); k];
        for (cid, groups) in &v.preferences {
            if let Some(j) = knames.get(cid, &entity, &mut out) {
                per[j] = anames.order(groups, &entity, &mut out);
            }
        }
        vertex_preferences.push(per);
    }
    let inst = FlowInstance {
        vertices: d.vertices.iter().map(|v| v.id.clone()).collect(),
        arcs,
        commodities,
        vertex_preferences,
    };
    finish(inst, out, FlowInstance::validate)
}

fn flow_from_map(inst: &FlowInstance, map: &FlowMap) -> Result<MultiFlow> {
    let mut out = Vec::new();
    let knames = Names::new("commodity", inst.commodities.iter().map(|c| c.id.as_str()));
    let anames = Names::new("arc", inst.arcs.iter().map(|a| a.id.as_str()));
    let mut flow = MultiFlow::zero(inst.commodities.len(), inst.arcs.len());
    for (cid, arcs) in map {
        let Some(j) = knames.get(cid, "flow", &mut out) else {
            continue;
        };
        for (aid, n) in arcs {
            if let Some(a) = anames.get(aid, &format!("flow of {cid}"), &mut out) {
                flow.values[j][a] = n.0.clone();
            }
        }
    }
    finish(flow, out, |_| Vec::new())
}

fn flow_to_map(inst: &FlowInstance, flow: &MultiFlow) -> FlowMap {
    inst.commodities
        .iter()
        .zip(&flow.values)
        .map(|(c, vals)| {
            let arcs = inst
                .arcs
                .iter()
                .zip(vals)
                .filter(|(_, v)| !v.is_zero())
                .map(|(a, v)| (a.id.clone(), Num(v.clone())))
                .collect();
            (c.id.clone(), arcs)
        })
        .collect()
}

fn groups(order: &WeakOrder, name: impl Fn(usize) -> String) -> Groups {
    order
        .groups()
        .iter()
        .map(|g| g.iter().map(|&a| name(a)).collect())
        .collect()
}

fn to_value<T: Serialize>(doc: &T) -> Value {
    serde_json::to_value(doc).expect("document types always serialize")
}

/// The instance as a JSON document; `flow` is only written for `smf`.
pub fn instance_to_json(inst: &Instance, flow: Option<&MultiFlow>) -> Value {
    match inst {
        Instance::Shm(i) => to_value(&ShmDoc {
            kind: "shm".into(),
            version: VERSION,
            vertices: i
                .vertices
                .iter()
                .enumerate()
                .map(|(v, id)| ShmVertex {
                    id: id.clone(),
                    capacity: i.capacity[v].into(),
                    preferences: groups(&i.preferences[v], |e| i.edges[e].id.clone()),
                })
                .collect(),
            edges: i
                .edges
                .iter()
                .map(|e| ShmEdge {
                    id: e.id.clone(),
                    members: e.members.iter().map(|&v| i.vertices[v].clone()).collect(),
                })
                .collect(),
        }),
        Instance::Cacq(i) => to_value(&CacqDoc {
            kind: "cacq".into(),
            version: VERSION,
            students: i
                .students
                .iter()
                .zip(&i.student_preferences)
                .map(|(id, p)| CacqStudent {
                    id: id.clone(),
                    preferences: groups(p, |e| i.edges[e].id.clone()),
                })
                .collect(),
            colleges: i
                .colleges
                .iter()
                .map(|c| CacqCollege {
                    id: c.id.clone(),
                    quota: c.quota.into(),
                    preferences: groups(&c.preferences, |s| i.students[s].clone()),
                })
                .collect(),
            edges: i
                .edges
                .iter()
                .map(|e| CacqEdge {
                    id: e.id.clone(),
                    student: i.students[e.student].clone(),
                    college: i.colleges[e.college].id.clone(),
                })
                .collect(),
            sets: i
                .sets
                .iter()
                .map(|s| CacqSet {
                    id: s.id.clone(),
                    colleges: s
                        .colleges
                        .iter()
                        .map(|&c| i.colleges[c].id.clone())
                        .collect(),
                    quota: s.quota.into(),
                    master: groups(&s.master, |st| i.students[st].clone()),
                })
                .collect(),
        }),
        Instance::Smf(i) => to_value(&SmfDoc {
            kind: "smf".into(),
            version: VERSION,
            vertices: i
                .vertices
                .iter()
                .enumerate()
                .map(|(v, id)| SmfVertex {
                    id: id.clone(),
                    preferences: i
                        .commodities
                        .iter()
                        .zip(&i.vertex_preferences[v])
                        .map(|(c, o)| (c.id.clone(), groups(o, |a| i.arcs[a].id.clone())))
                        .collect(),
                })
                .collect(),
            commodities: i
                .commodities
                .iter()
                .map(|c| SmfCommodity {
                    id: c.id.clone(),
                    source: i.vertices[c.source].clone(),
                    sink: i.vertices[c.sink].clone(),
                })
                .collect(),
            arcs: i
                .arcs
                .iter()
                .map(|a| SmfArc {
                    id: a.id.clone(),
                    tail: i.vertices[a.tail].clone(),
                    head: i.vertices[a.head].clone(),
                    capacity: a.capacity.into(),
                    commodity_capacity: i
                        .commodities
                        .iter()
                        .zip(&a.commodity_capacity)
                        .map(|(c, &q)| (c.id.clone(), q.into()))
                        .collect(),
                    preferences: groups(&a.preferences, |j| i.commodities[j].id.clone()),
                })
                .collect(),
            flow: flow.map(|f| flow_to_map(i, f)),
        }),
    }
}

/// Parses a solution document (or the solution inside a certificate) against
/// its instance. For `cacq` the instance must already be normalized.
pub fn parse_solution(text: &str, inst: &Instance) -> Result<Solution> {
    let mut doc = parse_json(text)?;
    if kind_of(&doc)? == "certificate" {
        doc = doc
            .get("solution")
            .cloned()
            .ok_or_else(|| Error::Parse("certificate has no `solution` field".into()))?;
    }
    let kind = kind_of(&doc)?.to_string();
    let mut out = Vec::new();
    let solution = match (kind.as_str(), inst) {
        ("shm-solution", Instance::Shm(i)) => {
            let d: ShmSolutionDoc = decode(doc)?;
            let enames = Names::new("edge", i.edges.iter().map(|e| e.id.as_str()));
            let vnames = Names::new("vertex", i.vertices.iter().map(String::as_str));
            let mut matching = vec![false; i.edges.len()];
            for id in &d.matching {
                if let Some(e) = enames.get(id, "matching", &mut out) {
                    matching[e] = true;
                }
            }
            let mut capacity = i.capacity.clone();
            for (id, n) in &d.capacity {
                if let Some(v) = vnames.get(id, "capacity", &mut out) {
                    capacity[v] = count(n, &format!("vertex {id}"), "capacity", &mut out);
                }
            }
            Solution::Shm { matching, capacity }
        }
        ("cacq-solution", Instance::Cacq(i)) => {
            let d: CacqSolutionDoc = decode(doc)?;
            let enames = Names::new("edge", i.edges.iter().map(|e| e.id.as_str()));
            let snames = Names::new("set", i.sets.iter().map(|s| s.id.as_str()));
            let mut matching = vec![false; i.edges.len()];
            for id in &d.matching {
                if let Some(e) = enames.get(id, "matching", &mut out) {
                    matching[e] = true;
                }
            }
            let mut quota: Vec<u64> = i.sets.iter().map(|s| s.quota).collect();
            for (id, n) in &d.quota {
                if let Some(s) = snames.get(id, "quota", &mut out) {
                    quota[s] = count(n, &format!("set {id}"), "quota", &mut out);
                }
            }
            Solution::Cacq { matching, quota }
        }
        ("smf-solution", Instance::Smf(i)) => {
            let d: SmfSolutionDoc = decode(doc)?;
            let flow = flow_from_map(i, &d.flow)?;
            let anames = Names::new("arc", i.arcs.iter().map(|a| a.id.as_str()));
            let knames = Names::new("commodity", i.commodities.iter().map(|c| c.id.as_str()));
            let mut caps = Capacities::of(i);
            for (id, n) in &d.capacity {
                if let Some(a) = anames.get(id, "capacity", &mut out) {
                    caps.aggregate[a] = count(n, &format!("arc {id}"), "capacity", &mut out);
                }
            }
            for (id, per) in &d.commodity_capacity {
                let Some(a) = anames.get(id, "commodity capacity", &mut out) else {
                    continue;
                };
                for (cid, n) in per {
                    if let Some(j) = knames.get(cid, &format!("arc {id}"), &mut out) {
                        caps.commodity[j][a] =
                            count(n, &format!("arc {id}"), "commodity capacity", &mut out);
                    }
                }
            }
            Solution::Smf {
                flow,
                capacities: caps,
            }
        }
        (k, i) => {
            return Err(Error::Parse(format!(
                "solution kind `{k}` does not fit a `{}` instance",
                i.kind()
            )))
        }
    };
    finish(solution, out, |_| Vec::new())
}

/// The solution as a JSON document. Capacities equal to the instance's are
/// still written so the document stands on its own.
pub fn solution_to_json(solution: &Solution, inst: &Instance) -> Value {
    match (solution, inst) {
        (Solution::Shm { matching, capacity }, Instance::Shm(i)) => to_value(&ShmSolutionDoc {
            kind: "shm-solution".into(),
            version: VERSION,
            matching: selected(matching, |e| i.edges[e].id.clone()),
            capacity: i
                .vertices
                .iter()
                .zip(capacity)
                .map(|(v, &q)| (v.clone(), q.into()))
                .collect(),
        }),
        (Solution::Cacq { matching, quota }, Instance::Cacq(i)) => to_value(&CacqSolutionDoc {
            kind: "cacq-solution".into(),
            version: VERSION,
            matching: selected(matching, |e| i.edges[e].id.clone()),
            quota: i
                .sets
                .iter()
                .zip(quota)
                .map(|(s, &q)| (s.id.clone(), q.into()))
                .collect(),
        }),
        (Solution::Smf { flow, capacities }, Instance::Smf(i)) => to_value(&SmfSolutionDoc {
            kind: "smf-solution".into(),
            version: VERSION,
            flow: flow_to_map(i, flow),
            capacity: i
                .arcs
                .iter()
                .zip(&capacities.aggregate)
                .map(|(a, &c)| (a.id.clone(), c.into()))
                .collect(),
            commodity_capacity: i
                .arcs
                .iter()
                .enumerate()
                .map(|(a, arc)| {
                    let per = i
                        .commodities
                        .iter()
                        .enumerate()
                        .map(|(j, c)| (c.id.clone(), capacities.commodity[j][a].into()))
                        .collect();
                    (arc.id.clone(), per)
                })
                .collect(),
        }),
        _ => panic!("solution and instance kinds differ"),
    }
}

fn selected(flags: &[bool], name: impl Fn(usize) -> String) -> Vec<String> {
    flags
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(e, _)| name(e))
        .collect()
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    // serde_json's map is ordered by key unless `preserve_order` is on.
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::oracle::{generate, Family, Generated, GeneratorConfig};

    fn round_trip(inst: &Instance, flow: Option<&MultiFlow>) {
        let text = to_canonical_string(&instance_to_json(inst, flow));
        let (back, back_flow) = parse_instance(&text).unwrap();
        assert_eq!(
            to_canonical_string(&instance_to_json(&back, back_flow.as_ref())),
            text
        );
        match (inst, &back) {
            (Instance::Shm(a), Instance::Shm(b)) => assert_eq!(a, b),
            (Instance::Cacq(a), Instance::Cacq(b)) => assert_eq!(a, b),
            (Instance::Smf(a), Instance::Smf(b)) => assert_eq!(a, b),
            _ => panic!("kind changed"),
        }
        assert_eq!(flow, back_flow.as_ref());
    }

    #[test]
    fn fixtures_round_trip() {
        round_trip(&Instance::Shm(fixtures::triangle()), None);
        round_trip(&Instance::Cacq(fixtures::hungarian_style()), None);
        let (i, f) = fixtures::fractional_cycle();
        round_trip(&Instance::Smf(i), Some(&f));
    }

    #[test]
    fn generated_round_trip() {
        for seed in 0..15 {
            for family in [Family::Shm, Family::Cacq, Family::Smf] {
                let mut c = GeneratorConfig::new(family, seed);
                c.tie_rate = 300;
                match generate(&c).unwrap() {
                    Generated::Shm(i) => round_trip(&Instance::Shm(i), None),
                    Generated::Cacq(i) => round_trip(&Instance::Cacq(i), None),
                    Generated::Smf(i, f) => round_trip(&Instance::Smf(i), Some(&f)),
                }
            }
        }
    }

    const TRIANGLE: &str = r#"{"kind":"shm","version":1,
        "vertices":[
          {"id":"a","capacity":1,"preferences":[["ab"],["ca"]]},
          {"id":"b","capacity":1,"preferences":[["bc"],["ab"]]},
          {"id":"c","capacity":1,"preferences":[["ca"],["bc"]]}],
        "edges":[{"id":"ab","members":["a","b"]},{"id":"bc","members":["b","c"]},
                 {"id":"ca","members":["c","a"]}]}"#;

    #[test]
    fn parses_handwritten_triangle() {
        let (inst, _) = parse_instance(TRIANGLE).unwrap();
        let Instance::Shm(i) = inst else { panic!() };
        assert_eq!(i, fixtures::triangle());
    }

    #[test]
    fn rejects_unknown_fields_and_versions() {
        let extra = TRIANGLE.replacen("\"version\":1,", "\"version\":1,\"colour\":2,", 1);
        assert!(matches!(parse_instance(&extra), Err(Error::Parse(_))));
        let v2 = TRIANGLE.replacen("\"version\":1", "\"version\":2", 1);
        assert!(matches!(parse_instance(&v2), Err(Error::Parse(_))));
    }

    #[test]
    fn fractional_capacity_is_a_violation() {
        for cap in ["\"1/2\"", "0.5", "-1"] {
            let bad = TRIANGLE.replacen("\"capacity\":1", &format!("\"capacity\":{cap}"), 1);
            let Err(Error::Invalid(v)) = parse_instance(&bad) else {
                panic!("{cap} accepted")
            };
            assert_eq!(v[0].rule, "integral-capacity");
        }
        let fine = TRIANGLE.replacen("\"capacity\":1", "\"capacity\":\"2/2\"", 1);
        assert!(parse_instance(&fine).is_ok());
    }

    #[test]
    fn dangling_reference_is_a_violation() {
        let bad = TRIANGLE.replacen("[\"a\",\"b\"]", "[\"a\",\"z\"]", 1);
        let Err(Error::Invalid(v)) = parse_instance(&bad) else {
            panic!()
        };
        assert!(v.iter().any(|x| x.rule == "dangling-reference"));
    }

    #[test]
    fn solution_round_trip() {
        let inst = Instance::Shm(fixtures::triangle());
        let sol = Solution::Shm {
            matching: vec![true, true, false],
            capacity: vec![1, 2, 1],
        };
        let text = to_canonical_string(&solution_to_json(&sol, &inst));
        assert_eq!(parse_solution(&text, &inst).unwrap(), sol);
        let partial = r#"{"kind":"shm-solution","version":1,"matching":["ab"]}"#;
        assert_eq!(
            parse_solution(partial, &inst).unwrap(),
            Solution::Shm {
                matching: vec![true, false, false],
                capacity: vec![1, 1, 1]
            }
        );
    }
}
