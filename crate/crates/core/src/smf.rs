//! Stable multicommodity flows: stability checking and integral rounding.
//!
//! [`round_stable_flow`] takes a fractional stable flow, rounds each
//! commodity by augmenting along fractional cycles and source-sink paths,
//! and revises aggregate arc capacities so the rounded flow stays stable.
//! Commodity capacities never change.

use crate::error::{Error, Result};
use crate::model::{CapacityRevision, FlowInstance, MultiFlow};
use crate::rational::{ceil, floor, int, Rational};
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::collections::{BTreeSet, VecDeque};

/// Aggregate capacities `c(a)` and per-commodity capacities `c^j(a)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Capacities {
    pub aggregate: Vec<u64>,
    /// `commodity[j][a]`.
    pub commodity: Vec<Vec<u64>>,
}

impl Capacities {
    pub fn of(inst: &FlowInstance) -> Self {
        Capacities {
            aggregate: inst.arcs.iter().map(|a| a.capacity).collect(),
            commodity: (0..inst.num_commodities())
                .map(|j| inst.arcs.iter().map(|a| a.commodity_capacity[j]).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockingWalk {
    pub commodity: String,
    pub vertices: Vec<String>,
    pub arcs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConservationError {
    pub commodity: String,
    pub vertex: String,
    #[serde(with = "crate::rational::serde_rational")]
    pub imbalance: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArcExcess {
    pub arc: String,
    /// `None` for the aggregate capacity.
    pub commodity: Option<String>,
    #[serde(with = "crate::rational::serde_rational")]
    pub value: Rational,
    pub capacity: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FlowVerdict {
    pub negative_values: Vec<String>,
    pub conservation: Vec<ConservationError>,
    pub capacity_violations: Vec<ArcExcess>,
    /// At most one witness per commodity.
    pub blocking_walks: Vec<BlockingWalk>,
}

impl FlowVerdict {
    pub fn is_feasible(&self) -> bool {
        self.negative_values.is_empty()
            && self.conservation.is_empty()
            && self.capacity_violations.is_empty()
    }

    pub fn passes(&self) -> bool {
        self.is_feasible() && self.blocking_walks.is_empty()
    }
}

fn check_shape(inst: &FlowInstance, f: &MultiFlow) -> Result<()> {
    if f.values.len() != inst.num_commodities()
        || f.values.iter().any(|v| v.len() != inst.arcs.len())
    {
        return Err(Error::Parse(format!(
            "flow must have {} commodities over {} arcs",
            inst.num_commodities(),
            inst.arcs.len()
        )));
    }
    Ok(())
}

/// Checks `f` against the instance's own capacities.
pub fn verify_flow(inst: &FlowInstance, f: &MultiFlow) -> FlowVerdict {
    verify_flow_under(inst, &Capacities::of(inst), f)
}

/// Feasibility and blocking-walk search under the given capacities.
pub fn verify_flow_under(inst: &FlowInstance, caps: &Capacities, f: &MultiFlow) -> FlowVerdict {
    let mut verdict = FlowVerdict::default();
    let k = inst.num_commodities();
    for (j, values) in f.values.iter().enumerate() {
        for (a, v) in values.iter().enumerate() {
            if v.is_negative() {
                verdict
                    .negative_values
                    .push(format!("{}/{}", inst.arcs[a].id, inst.commodities[j].id));
            }
            let cap = caps.commodity[j][a];
            if v > &int(cap as i64) {
                verdict.capacity_violations.push(ArcExcess {
                    arc: inst.arcs[a].id.clone(),
                    commodity: Some(inst.commodities[j].id.clone()),
                    value: v.clone(),
                    capacity: cap,
                });
            }
        }
    }
    for (a, arc) in inst.arcs.iter().enumerate() {
        let total = f.total_on(a);
        if total > int(caps.aggregate[a] as i64) {
            verdict.capacity_violations.push(ArcExcess {
                arc: arc.id.clone(),
                commodity: None,
                value: total,
                capacity: caps.aggregate[a],
            });
        }
    }
    for j in 0..k {
        let c = &inst.commodities[j];
        for v in 0..inst.vertices.len() {
            if v == c.source || v == c.sink {
                continue;
            }
            let out: Rational = inst.out_arcs(v).map(|a| &f.values[j][a]).sum();
            let inn: Rational = inst.in_arcs(v).map(|a| &f.values[j][a]).sum();
            if out != inn {
                verdict.conservation.push(ConservationError {
                    commodity: c.id.clone(),
                    vertex: inst.vertices[v].clone(),
                    imbalance: out - inn,
                });
            }
        }
    }
    for j in 0..k {
        if let Some(arcs) = find_blocking_walk(inst, caps, f, j) {
            let mut vertices = vec![inst.vertices[inst.arcs[arcs[0]].tail].clone()];
            vertices.extend(
                arcs.iter()
                    .map(|&a| inst.vertices[inst.arcs[a].head].clone()),
            );
            verdict.blocking_walks.push(BlockingWalk {
                commodity: inst.commodities[j].id.clone(),
                vertices,
                arcs: arcs.iter().map(|&a| inst.arcs[a].id.clone()).collect(),
            });
        }
    }
    verdict
}

/// Arc sequence of a walk blocking commodity `j`, found by breadth-first
/// search over usable arcs from valid first arcs to valid last arcs.
pub fn find_blocking_walk(
    inst: &FlowInstance,
    caps: &Capacities,
    f: &MultiFlow,
    j: usize,
) -> Option<Vec<usize>> {
    let fj = &f.values[j];
    let src = inst.commodities[j].source;
    let sink = inst.commodities[j].sink;
    let usable: Vec<bool> = (0..inst.arcs.len())
        .map(|a| {
            let arc = &inst.arcs[a];
            if fj[a] >= int(caps.commodity[j][a] as i64) {
                return false;
            }
            f.total_on(a) < int(caps.aggregate[a] as i64)
                || (0..inst.num_commodities()).any(|jj| {
                    jj != j && f.values[jj][a].is_positive() && arc.preferences.prefers(j, jj)
                })
        })
        .collect();
    let pref = |v: usize| &inst.vertex_preferences[v][j];
    let can_start = |a: usize| {
        let v = inst.arcs[a].tail;
        v == src
            || inst
                .out_arcs(v)
                .any(|b| fj[b].is_positive() && pref(v).prefers(a, b))
    };
    let can_end = |a: usize| {
        let v = inst.arcs[a].head;
        v == sink
            || inst
                .in_arcs(v)
                .any(|b| fj[b].is_positive() && pref(v).prefers(a, b))
    };
    let mut parent: Vec<Option<Option<usize>>> = vec![None; inst.arcs.len()];
    let mut queue = VecDeque::new();
    for a in 0..inst.arcs.len() {
        if usable[a] && can_start(a) {
            parent[a] = Some(None);
            queue.push_back(a);
        }
    }
    while let Some(a) = queue.pop_front() {
        if can_end(a) {
            let mut walk = vec![a];
            let mut cur = a;
            while let Some(Some(p)) = parent[cur] {
                walk.push(p);
                cur = p;
            }
            walk.reverse();
            return Some(walk);
        }
        for b in inst.out_arcs(inst.arcs[a].head) {
            if usable[b] && parent[b].is_none() {
                parent[b] = Some(Some(a));
                queue.push_back(b);
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureKind {
    Cycle,
    StPath,
}

/// Fractional cycle or source-sink path of one commodity, oriented from its
/// first vertex. `forward[i]` says whether arc `arcs[i]` points along it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentingStructure {
    pub kind: StructureKind,
    pub start: usize,
    pub arcs: Vec<usize>,
    pub forward: Vec<bool>,
    /// Smallest push along the orientation making some value integral.
    pub eps1: Rational,
    /// Same against the orientation.
    pub eps2: Rational,
}

/// Greedy walk over fractional arcs of `g` (commodity `j`), starting at the
/// source when it touches one and always extending by the lowest-index
/// unused fractional arc.
pub fn find_fractional_structure(
    inst: &FlowInstance,
    j: usize,
    g: &[Rational],
) -> Result<AugmentingStructure> {
    let frac: Vec<bool> = g.iter().map(|v| !v.is_integer()).collect();
    let src = inst.commodities[j].source;
    let sink = inst.commodities[j].sink;
    let touches = |v: usize, a: usize| inst.arcs[a].tail == v || inst.arcs[a].head == v;
    let first = (0..g.len())
        .find(|&a| frac[a])
        .ok_or_else(|| Error::Internal("no fractional arc".into()))?;
    let from_source = (0..g.len()).any(|a| frac[a] && touches(src, a));
    let start = if from_source {
        src
    } else {
        inst.arcs[first].tail
    };

    let mut path_vertices = vec![start];
    let mut arcs = Vec::new();
    let mut forward = Vec::new();
    let mut used = BTreeSet::new();
    let (kind, start, arcs, forward) = loop {
        let v = *path_vertices.last().unwrap();
        let Some(a) = (0..g.len()).find(|&a| frac[a] && !used.contains(&a) && touches(v, a)) else {
            return Err(Error::Internal(format!(
                "fractional walk stuck at vertex {}",
                inst.vertices[v]
            )));
        };
        used.insert(a);
        let fwd = inst.arcs[a].tail == v;
        let w = if fwd {
            inst.arcs[a].head
        } else {
            inst.arcs[a].tail
        };
        arcs.push(a);
        forward.push(fwd);
        if let Some(p) = path_vertices.iter().position(|&u| u == w) {
            break (
                StructureKind::Cycle,
                path_vertices[p],
                arcs[p..].to_vec(),
                forward[p..].to_vec(),
            );
        }
        if from_source && w == sink {
            break (StructureKind::StPath, start, arcs, forward);
        }
        path_vertices.push(w);
    };
    let gap_up = |x: &Rational| ceil(x) - x;
    let gap_down = |x: &Rational| x - floor(x);
    let min = |it: Vec<Rational>| it.into_iter().min().expect("nonempty structure");
    let eps1 = min(arcs
        .iter()
        .zip(&forward)
        .map(|(&a, &fw)| if fw { gap_up(&g[a]) } else { gap_down(&g[a]) })
        .collect());
    let eps2 = min(arcs
        .iter()
        .zip(&forward)
        .map(|(&a, &fw)| if fw { gap_down(&g[a]) } else { gap_up(&g[a]) })
        .collect());
    Ok(AugmentingStructure {
        kind,
        start,
        arcs,
        forward,
        eps1,
        eps2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundingMode {
    /// Path steps keep each commodity's value within 1 of the original.
    #[default]
    Default,
    /// Path steps steer the aggregate value toward the original.
    Balanced,
}

impl std::str::FromStr for RoundingMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "default" => Ok(RoundingMode::Default),
            "balanced" => Ok(RoundingMode::Balanced),
            other => Err(format!("unknown rounding mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowStep {
    pub commodity: String,
    pub kind: StructureKind,
    pub arcs: Vec<String>,
    /// True when pushing along the orientation.
    pub along: bool,
    #[serde(with = "crate::rational::serde_rational")]
    pub epsilon: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub value_after: Rational,
}

/// Rounds every commodity in index order. `f` must be feasible.
pub fn round_flow(
    inst: &FlowInstance,
    f: &MultiFlow,
    mode: RoundingMode,
) -> Result<(MultiFlow, Vec<FlowStep>)> {
    check_shape(inst, f)?;
    let mut g = f.clone();
    let target: Vec<Rational> = (0..inst.num_commodities())
        .map(|j| f.value(inst, j))
        .collect();
    let total_target: Rational = target.iter().sum();
    let one = int(1);
    let mut steps = Vec::new();
    for j in 0..inst.num_commodities() {
        while g.values[j].iter().any(|v| !v.is_integer()) {
            let x = find_fractional_structure(inst, j, &g.values[j])?;
            let along = match x.kind {
                StructureKind::Cycle => x.eps1 < x.eps2,
                StructureKind::StPath => {
                    let gj = g.value(inst, j);
                    match mode {
                        RoundingMode::Default => gj <= target[j],
                        RoundingMode::Balanced => {
                            if g.total_value(inst) < total_target {
                                gj <= &target[j] + &one
                            } else {
                                gj < &target[j] - &one
                            }
                        }
                    }
                }
            };
            let eps = if along {
                x.eps1.clone()
            } else {
                x.eps2.clone()
            };
            for (&a, &fw) in x.arcs.iter().zip(&x.forward) {
                if fw == along {
                    g.values[j][a] += &eps;
                } else {
                    g.values[j][a] -= &eps;
                }
            }
            steps.push(FlowStep {
                commodity: inst.commodities[j].id.clone(),
                kind: x.kind,
                arcs: x.arcs.iter().map(|&a| inst.arcs[a].id.clone()).collect(),
                along,
                epsilon: eps,
                value_after: g.value(inst, j),
            });
        }
    }
    Ok((g, steps))
}

/// Revised capacities making an integral `g` stable when `f` was.
pub fn compute_flow_capacities(
    inst: &FlowInstance,
    f: &MultiFlow,
    g: &MultiFlow,
) -> Result<Capacities> {
    check_shape(inst, f)?;
    check_shape(inst, g)?;
    let caps = Capacities::of(inst);
    let as_u64 = |x: &Rational| -> u64 { x.to_integer().try_into().unwrap_or(u64::MAX) };
    let mut commodity = caps.commodity.clone();
    for j in 0..inst.num_commodities() {
        for a in 0..inst.arcs.len() {
            let gv = &g.values[j][a];
            if !gv.is_integer() || gv.is_negative() {
                return Err(Error::Precondition(format!(
                    "rounded value on arc {} for commodity {} is not a nonnegative integer",
                    inst.arcs[a].id, inst.commodities[j].id
                )));
            }
            if f.values[j][a].is_zero() && !gv.is_zero() {
                return Err(Error::Precondition(format!(
                    "support containment: arc {} carries commodity {} only after rounding",
                    inst.arcs[a].id, inst.commodities[j].id
                )));
            }
            let c = caps.commodity[j][a];
            commodity[j][a] = if f.values[j][a] == int(c as i64) {
                as_u64(gv)
            } else {
                as_u64(gv).max(c)
            };
        }
    }
    let aggregate = (0..inst.arcs.len())
        .map(|a| {
            let c = caps.aggregate[a];
            let gt = as_u64(&g.total_on(a));
            if f.total_on(a) == int(c as i64) {
                gt
            } else {
                gt.max(c)
            }
        })
        .collect();
    Ok(Capacities {
        aggregate,
        commodity,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommodityDrift {
    pub commodity: String,
    #[serde(with = "crate::rational::serde_rational")]
    pub fractional: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub rounded: Rational,
}

impl CommodityDrift {
    pub fn drift(&self) -> Rational {
        (&self.rounded - &self.fractional).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowBounds {
    pub commodities: usize,
    pub mode: RoundingMode,
    pub max_deviation: u64,
    pub max_deviation_ok: bool,
    pub commodity_capacities_unchanged: bool,
    #[serde(with = "crate::rational::serde_rational")]
    pub max_commodity_drift: Rational,
    pub commodity_drift_ok: bool,
    #[serde(with = "crate::rational::serde_rational")]
    pub aggregate_drift: Rational,
    pub aggregate_drift_ok: bool,
}

impl FlowBounds {
    pub fn holds(&self) -> bool {
        self.max_deviation_ok
            && self.commodity_capacities_unchanged
            && self.commodity_drift_ok
            && self.aggregate_drift_ok
    }
}

#[derive(Debug, Clone)]
pub struct FlowSolution {
    pub rounded: MultiFlow,
    pub capacities: Capacities,
    pub revision: CapacityRevision,
    pub drift: Vec<CommodityDrift>,
    pub steps: Vec<FlowStep>,
    pub verdict: FlowVerdict,
    pub bounds: FlowBounds,
}

impl FlowSolution {
    pub fn passes(&self) -> bool {
        self.verdict.passes() && self.bounds.holds()
    }
}

/// Checks that `f` is stable, rounds it, and certifies the result.
///
/// Default mode certifies per-commodity drift `< 1` and aggregate drift
/// `< k`; balanced mode certifies `< 2` and `< 1`.
pub fn round_stable_flow(
    inst: &FlowInstance,
    f: &MultiFlow,
    mode: RoundingMode,
) -> Result<FlowSolution> {
    let violations = inst.validate();
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    check_shape(inst, f)?;
    let input = verify_flow(inst, f);
    if !input.is_feasible() {
        return Err(Error::Precondition(format!(
            "input flow is not feasible: {input:?}"
        )));
    }
    if let Some(w) = input.blocking_walks.first() {
        return Err(Error::Unstable(format!(
            "commodity {} is blocked along {}",
            w.commodity,
            w.vertices.join(" -> ")
        )));
    }
    let (g, steps) = round_flow(inst, f, mode)?;
    let capacities = compute_flow_capacities(inst, f, &g)?;
    let verdict = verify_flow_under(inst, &capacities, &g);
    let original = Capacities::of(inst);
    let revision = CapacityRevision::from_pairs(
        inst.arcs.iter().map(|a| a.id.clone()),
        &original.aggregate,
        &capacities.aggregate,
    );
    let k = inst.num_commodities();
    let drift: Vec<CommodityDrift> = (0..k)
        .map(|j| CommodityDrift {
            commodity: inst.commodities[j].id.clone(),
            fractional: f.value(inst, j),
            rounded: g.value(inst, j),
        })
        .collect();
    let max_commodity_drift = drift
        .iter()
        .map(CommodityDrift::drift)
        .max()
        .unwrap_or_else(Rational::zero);
    let aggregate_drift = (g.total_value(inst) - f.total_value(inst)).abs();
    let (commodity_limit, aggregate_limit) = match mode {
        RoundingMode::Default => (int(1), int(k as i64)),
        RoundingMode::Balanced => (int(2), int(1)),
    };
    let max_deviation = revision.max_deviation();
    let bounds = FlowBounds {
        commodities: k,
        mode,
        max_deviation,
        max_deviation_ok: max_deviation < k.max(1) as u64,
        commodity_capacities_unchanged: capacities.commodity == original.commodity,
        commodity_drift_ok: max_commodity_drift < commodity_limit,
        aggregate_drift_ok: aggregate_drift.is_zero() || aggregate_drift < aggregate_limit,
        max_commodity_drift,
        aggregate_drift,
    };
    Ok(FlowSolution {
        rounded: g,
        capacities,
        revision,
        drift,
        steps,
        verdict,
        bounds,
    })
}
