//! Stable hypergraph matching with bounded capacity revisions.
//!
//! The pipeline breaks ties, appends the saturation gadget, finds a
//! dominating point of the incidence-plus-identity system with Scarf's
//! algorithm, rounds it by iteratively dropping vertex rows (and finally the
//! aggregate capacity row), derives revised capacities from the rounded
//! vector, strips the gadget, and verifies stability on the original orders.

use crate::error::{Error, Result};
use crate::model::{CapacityRevision, Hyperedge, HypergraphInstance};
use crate::polytope::{self, LinearSystem, Relation};
use crate::rational::{int, Rational};
use crate::scarf::{DominatingPoint, PivotEvent, ScarfProblem, ScarfSolver};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

/// A gadgeted instance together with the number of original edges, which
/// come first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gadgeted {
    pub instance: HypergraphInstance,
    pub real_edges: usize,
}

impl Gadgeted {
    pub fn is_gadget(&self, e: usize) -> bool {
        e >= self.real_edges
    }
}

/// Appends `q(v)` singleton edges `{v}` to every vertex, each strictly worse
/// for `v` than everything before it.
pub fn add_saturation_gadget(inst: &HypergraphInstance) -> Gadgeted {
    let mut out = inst.clone();
    let real_edges = inst.edges.len();
    for (v, &q) in inst.capacity.iter().enumerate() {
        let start = out.edges.len();
        for j in 1..=q {
            out.edges.push(Hyperedge {
                id: format!("{}#gadget{}", inst.vertices[v], j),
                members: vec![v],
            });
        }
        out.preferences[v].append_worst(start..out.edges.len());
    }
    Gadgeted {
        instance: out,
        real_edges,
    }
}

/// Restricts a matching on the gadgeted instance to the original edges.
pub fn strip_gadget(matching: &[bool], real_edges: usize) -> Vec<bool> {
    matching[..real_edges].to_vec()
}

/// The Scarf problem of an instance plus the map between its columns and the
/// instance's edges. Edges touching a zero-capacity vertex have no column and
/// are fixed to zero.
#[derive(Debug, Clone)]
pub struct ShmScarf {
    pub problem: ScarfProblem,
    pub column_edge: Vec<usize>,
    pub edge_column: Vec<Option<usize>>,
    pub vertex_row: Vec<Option<usize>>,
}

impl ShmScarf {
    /// Expands a column vector to a vector over all edges.
    pub fn edge_vector(&self, x: &[Rational]) -> Vec<Rational> {
        self.edge_column
            .iter()
            .map(|c| c.map_or_else(Rational::zero, |c| x[c].clone()))
            .collect()
    }
}

/// Vertex rows (rhs `q(v)`) followed by one identity row per edge (rhs 1).
/// Requires strict preferences.
pub fn build_shm_scarf(inst: &HypergraphInstance) -> Result<ShmScarf> {
    if !inst.is_strict() {
        return Err(Error::Precondition(
            "Scarf matrix needs strict preferences".into(),
        ));
    }
    let edge_kept: Vec<bool> = inst
        .edges
        .iter()
        .map(|e| e.members.iter().all(|&v| inst.capacity[v] > 0))
        .collect();
    let mut edge_column = vec![None; inst.edges.len()];
    let mut column_edge = Vec::new();
    for (e, &kept) in edge_kept.iter().enumerate() {
        if kept {
            edge_column[e] = Some(column_edge.len());
            column_edge.push(e);
        }
    }
    let m = column_edge.len();
    let mut matrix = Vec::new();
    let mut bounds = Vec::new();
    let mut orders = Vec::new();
    let mut vertex_row = vec![None; inst.vertices.len()];
    for (v, &q) in inst.capacity.iter().enumerate() {
        if q == 0 {
            continue;
        }
        let mut row = vec![Rational::zero(); m];
        for (c, &e) in column_edge.iter().enumerate() {
            if inst.contains(e, v) {
                row[c] = Rational::one();
            }
        }
        vertex_row[v] = Some(matrix.len());
        matrix.push(row);
        bounds.push(int(q as i64));
        orders.push(
            inst.preferences[v]
                .iter()
                .filter_map(|e| edge_column[e])
                .collect(),
        );
    }
    for c in 0..m {
        let mut row = vec![Rational::zero(); m];
        row[c] = Rational::one();
        matrix.push(row);
        bounds.push(Rational::one());
        orders.push(vec![c]);
    }
    let problem = ScarfProblem::new(matrix, bounds, orders)?;
    Ok(ShmScarf {
        problem,
        column_edge,
        edge_column,
        vertex_row,
    })
}

/// `A_v x` for every vertex.
pub fn vertex_loads(inst: &HypergraphInstance, x: &[Rational]) -> Vec<Rational> {
    let mut loads = vec![Rational::zero(); inst.vertices.len()];
    for (e, edge) in inst.edges.iter().enumerate() {
        if x[e].is_zero() {
            continue;
        }
        for &v in &edge.members {
            loads[v] += &x[e];
        }
    }
    loads
}

/// The row removed by one rounding iteration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeletedRow {
    Vertex { vertex: String },
    Aggregate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundingStep {
    pub deleted: DeletedRow,
    pub fractional_before: usize,
    pub fractional_after: usize,
    #[serde(with = "crate::rational::serde_rational")]
    pub objective: Rational,
}

fn fractional_count(z: &[Rational]) -> usize {
    z.iter().filter(|v| !v.is_integer()).count()
}

/// Iterative rounding of a dominating point of the gadgeted instance. The
/// instance must be strict and `x_star` must saturate every vertex.
pub fn round_shm(
    inst: &HypergraphInstance,
    x_star: &[Rational],
) -> Result<(Vec<Rational>, Vec<RoundingStep>)> {
    let n = inst.vertices.len();
    let m = inst.edges.len();
    let ell = inst.max_edge_size();
    let loads = vertex_loads(inst, x_star);
    for v in 0..n {
        if loads[v] != int(inst.capacity[v] as i64) {
            return Err(Error::Precondition(format!(
                "vertex {} is not saturated by the starting point",
                inst.vertices[v]
            )));
        }
    }
    let incidence = inst.incidence();
    let sizes: Vec<Rational> = (0..m).map(|e| int(inst.edge_size(e) as i64)).collect();
    let total = int(inst.total_capacity() as i64);

    let mut z = x_star.to_vec();
    let mut active = vec![true; n];
    let mut aggregate = true;
    let mut trace = Vec::new();
    while fractional_count(&z) > 0 {
        let before = fractional_count(&z);
        let deletable = (0..n).find(|&v| {
            active[v] && incidence[v].iter().filter(|&&e| !z[e].is_integer()).count() <= ell
        });
        let deleted = match deletable {
            Some(v) => {
                active[v] = false;
                DeletedRow::Vertex {
                    vertex: inst.vertices[v].clone(),
                }
            }
            None if aggregate && before <= 1 => {
                aggregate = false;
                DeletedRow::Aggregate
            }
            None => {
                return Err(Error::Internal(format!(
                    "no row can be deleted with {before} fractional components"
                )))
            }
        };

        let mut sys = LinearSystem::unit_box(m);
        for v in (0..n).filter(|&v| active[v]) {
            let mut row = vec![Rational::zero(); m];
            for &e in &incidence[v] {
                row[e] = Rational::one();
            }
            sys.add(row, Relation::Eq, int(inst.capacity[v] as i64));
        }
        if aggregate {
            sys.add(sizes.clone(), Relation::Eq, total.clone());
        }
        for (e, val) in z.iter().enumerate() {
            if val.is_integer() {
                sys.fix(e, val.clone());
            }
        }
        z = polytope::extreme_point(&sys, Some(&sizes), &z)?;
        let objective: Rational = z.iter().zip(&sizes).map(|(a, b)| a * b).sum();
        trace.push(RoundingStep {
            deleted,
            fractional_before: before,
            fractional_after: fractional_count(&z),
            objective,
        });
        if trace.len() > n + 1 {
            return Err(Error::Internal(
                "rounding exceeded |V| + 1 deletions".into(),
            ));
        }
    }
    Ok((z, trace))
}

/// `q'(v) = A_v y` where `x*` saturates `v`, else `max(q(v), A_v y)`.
pub fn compute_shm_capacities(
    inst: &HypergraphInstance,
    x_star: &[Rational],
    y: &[Rational],
) -> Result<Vec<u64>> {
    for (e, (xs, ys)) in x_star.iter().zip(y).enumerate() {
        if !ys.is_integer() || ys.is_negative() {
            return Err(Error::Precondition(format!(
                "rounded value of edge {} is not a nonnegative integer",
                inst.edges[e].id
            )));
        }
        if (xs.is_zero() || xs.is_one()) && xs != ys {
            return Err(Error::Precondition(format!(
                "edge {} is integral in the fractional point but changed",
                inst.edges[e].id
            )));
        }
    }
    let at_star = vertex_loads(inst, x_star);
    let at_y = vertex_loads(inst, y);
    Ok((0..inst.vertices.len())
        .map(|v| {
            let load = at_y[v].to_integer().try_into().unwrap_or(u64::MAX);
            if at_star[v] == int(inst.capacity[v] as i64) {
                load
            } else {
                load.max(inst.capacity[v])
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CapacityExcess {
    pub vertex: String,
    pub load: u64,
    pub capacity: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ShmVerdict {
    pub capacity_violations: Vec<CapacityExcess>,
    pub blocking_edges: Vec<String>,
}

impl ShmVerdict {
    pub fn passes(&self) -> bool {
        self.capacity_violations.is_empty() && self.blocking_edges.is_empty()
    }
}

/// Indices of edges blocking `matching` under `capacity`: an unused edge
/// where every member is unsaturated or holds some strictly worse edge.
pub fn blocking_edges(
    inst: &HypergraphInstance,
    capacity: &[u64],
    matching: &[bool],
) -> Vec<usize> {
    let incidence = inst.incidence();
    let load: Vec<u64> = incidence
        .iter()
        .map(|es| es.iter().filter(|&&e| matching[e]).count() as u64)
        .collect();
    (0..inst.edges.len())
        .filter(|&f| !matching[f])
        .filter(|&f| {
            inst.edges[f].members.iter().all(|&v| {
                load[v] < capacity[v]
                    || incidence[v]
                        .iter()
                        .any(|&g| matching[g] && inst.preferences[v].prefers(f, g))
            })
        })
        .collect()
}

/// Capacity violations and blocking edges of `matching`.
pub fn verify_shm(inst: &HypergraphInstance, capacity: &[u64], matching: &[bool]) -> ShmVerdict {
    let incidence = inst.incidence();
    let capacity_violations = incidence
        .iter()
        .enumerate()
        .filter_map(|(v, es)| {
            let load = es.iter().filter(|&&e| matching[e]).count() as u64;
            (load > capacity[v]).then(|| CapacityExcess {
                vertex: inst.vertices[v].clone(),
                load,
                capacity: capacity[v],
            })
        })
        .collect();
    ShmVerdict {
        capacity_violations,
        blocking_edges: blocking_edges(inst, capacity, matching)
            .into_iter()
            .map(|f| inst.edges[f].id.clone())
            .collect(),
    }
}

/// Bound checks recorded with every solve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShmBounds {
    pub ell: usize,
    pub max_deviation: u64,
    /// `Σ q' − Σ q`, which equals the gadgeted load change.
    pub sum_deviation: i64,
    /// `Σ_v A_v M − Σ q` over original edges only.
    pub stripped_load_deviation: i64,
    pub max_deviation_ok: bool,
    pub sum_deviation_ok: bool,
}

#[derive(Debug, Clone)]
pub struct ShmSolution {
    pub revision: CapacityRevision,
    /// Chosen original edges.
    pub matching: Vec<bool>,
    /// Dominating point over the gadgeted edges.
    pub fractional: Vec<Rational>,
    pub rounded: Vec<Rational>,
    pub real_edges: usize,
    pub pivots: u64,
    pub steps: Vec<RoundingStep>,
    pub verdict: ShmVerdict,
    pub bounds: ShmBounds,
}

impl ShmSolution {
    pub fn passes(&self) -> bool {
        self.verdict.passes() && self.bounds.max_deviation_ok && self.bounds.sum_deviation_ok
    }

    pub fn matched_ids<'a>(&self, inst: &'a HypergraphInstance) -> Vec<&'a str> {
        self.matching
            .iter()
            .zip(&inst.edges)
            .filter(|(m, _)| **m)
            .map(|(_, e)| e.id.as_str())
            .collect()
    }
}

/// Full pipeline on a validated instance.
pub fn solve_shm(inst: &HypergraphInstance) -> Result<ShmSolution> {
    solve_shm_with(inst, &ScarfSolver::from_env(), &mut |_| {})
}

pub fn solve_shm_with(
    inst: &HypergraphInstance,
    solver: &ScarfSolver,
    trace: &mut dyn FnMut(&PivotEvent),
) -> Result<ShmSolution> {
    let violations = inst.validate();
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let strict = inst.break_ties();
    let gadgeted = add_saturation_gadget(&strict);
    let g = &gadgeted.instance;
    let scarf = build_shm_scarf(g)?;
    let DominatingPoint { x, pivots, .. } = solver.solve_traced(&scarf.problem, trace)?;
    let x_star = scarf.edge_vector(&x);
    let (z, steps) = round_shm(g, &x_star)?;
    let revised = compute_shm_capacities(g, &x_star, &z)?;

    let full: Vec<bool> = z.iter().map(|v| v.is_one()).collect();
    let gadget_verdict = verify_shm(g, &revised, &full);
    if !gadget_verdict.passes() {
        return Err(Error::Internal(format!(
            "rounded matching fails on the gadgeted instance: {gadget_verdict:?}"
        )));
    }
    let matching = strip_gadget(&full, gadgeted.real_edges);
    let verdict = verify_shm(inst, &revised, &matching);

    let revision =
        CapacityRevision::from_pairs(inst.vertices.iter().cloned(), &inst.capacity, &revised);
    let ell = inst.max_edge_size();
    let max_deviation = revision.max_deviation();
    let sum_deviation = revision.sum_deviation();
    let real_load: i64 = matching
        .iter()
        .zip(&inst.edges)
        .filter(|(m, _)| **m)
        .map(|(_, e)| e.members.len() as i64)
        .sum();
    let bounds = ShmBounds {
        ell,
        max_deviation,
        sum_deviation,
        stripped_load_deviation: real_load - inst.total_capacity() as i64,
        max_deviation_ok: max_deviation + 1 <= ell as u64,
        sum_deviation_ok: sum_deviation >= 0 && sum_deviation + 1 <= ell as i64,
    };
    Ok(ShmSolution {
        revision,
        matching,
        fractional: x_star,
        rounded: z,
        real_edges: gadgeted.real_edges,
        pivots,
        steps,
        verdict,
        bounds,
    })
}
