//! Brute-force ground truth for tiny instances and seeded instance generators.

mod generate;
pub mod rng;

pub use generate::{generate, Family, Generated, GeneratorConfig, SMF_RETRY_CAP};

use crate::error::{Error, Result};
use crate::model::HypergraphInstance;
use crate::shm::blocking_edges;
use std::collections::BTreeMap;

pub const EDGE_CAP: usize = 20;

fn check_cap(inst: &HypergraphInstance, cap: usize) -> Result<()> {
    if inst.edges.len() > cap {
        return Err(Error::ResourceLimit(format!(
            "enumeration is capped at {cap} edges, instance has {}",
            inst.edges.len()
        )));
    }
    Ok(())
}

fn subset(mask: u64, m: usize) -> Vec<bool> {
    (0..m).map(|e| mask >> e & 1 == 1).collect()
}

fn loads(inst: &HypergraphInstance, matching: &[bool]) -> Vec<u64> {
    let mut out = vec![0u64; inst.vertices.len()];
    for (e, edge) in inst.edges.iter().enumerate() {
        if matching[e] {
            for &v in &edge.members {
                out[v] += 1;
            }
        }
    }
    out
}

/// Every capacity-feasible edge subset with no blocking edge, in increasing
/// bitmask order (edge `e` is bit `e`).
pub fn enumerate_stable(inst: &HypergraphInstance, capacity: &[u64]) -> Result<Vec<Vec<bool>>> {
    check_cap(inst, EDGE_CAP)?;
    let m = inst.edges.len();
    let mut out = Vec::new();
    for mask in 0..1u64 << m {
        let matching = subset(mask, m);
        let feasible = loads(inst, &matching)
            .iter()
            .zip(capacity)
            .all(|(l, c)| l <= c);
        if feasible && blocking_edges(inst, capacity, &matching).is_empty() {
            out.push(matching);
        }
    }
    Ok(out)
}

/// Revised capacity vectors within the bounds that admit a stable matching,
/// each with the first witness found (lowest bitmask).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NearFeasible {
    pub witnesses: BTreeMap<Vec<u64>, Vec<bool>>,
}

impl NearFeasible {
    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn contains(&self, capacity: &[u64]) -> bool {
        self.witnesses.contains_key(capacity)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u64>, &Vec<bool>)> {
        self.witnesses.iter()
    }
}

/// All `q'` with `max |q' − q| ≤ bound` (and `|Σ(q' − q)| ≤ sum_bound` when
/// given) under which some matching is stable.
///
/// For each edge subset `M` the admissible `q'` are searched vertex by
/// vertex: a vertex is either saturated (`q'(v) = |M(v)|`) or has room, and
/// every unused edge needs a saturated member holding no worse edge.
pub fn enumerate_near_feasible(
    inst: &HypergraphInstance,
    bound: u64,
    sum_bound: Option<u64>,
) -> Result<NearFeasible> {
    check_cap(inst, EDGE_CAP)?;
    let n = inst.vertices.len();
    let m = inst.edges.len();
    let incidence = inst.incidence();
    let mut result = NearFeasible::default();
    for mask in 0..1u64 << m {
        let matching = subset(mask, m);
        let load = loads(inst, &matching);
        if load
            .iter()
            .zip(&inst.capacity)
            .any(|(&l, &q)| l > q + bound)
        {
            continue;
        }
        // vertices of each unused edge able to turn it away when saturated
        let protectors: Vec<Vec<usize>> = (0..m)
            .filter(|&f| !matching[f])
            .map(|f| {
                inst.edges[f]
                    .members
                    .iter()
                    .copied()
                    .filter(|&v| {
                        !incidence[v]
                            .iter()
                            .any(|&g| matching[g] && inst.preferences[v].prefers(f, g))
                    })
                    .collect()
            })
            .collect();
        if protectors.iter().any(Vec::is_empty) {
            continue;
        }
        let options: Vec<(i64, i64)> = (0..n)
            .map(|v| {
                let q = inst.capacity[v] as i64;
                let lo = (q - bound as i64).max(load[v] as i64).max(0);
                (lo, q + bound as i64)
            })
            .collect();
        let mut search = Search {
            inst,
            load: &load,
            options: &options,
            protectors: &protectors,
            sum_bound: sum_bound.map(|s| s as i64),
            current: vec![0; n],
            saturated: vec![false; n],
            matching: &matching,
            out: &mut result,
        };
        search.run(0, 0);
    }
    Ok(result)
}

struct Search<'a> {
    inst: &'a HypergraphInstance,
    load: &'a [u64],
    options: &'a [(i64, i64)],
    protectors: &'a [Vec<usize>],
    sum_bound: Option<i64>,
    current: Vec<u64>,
    saturated: Vec<bool>,
    matching: &'a [bool],
    out: &'a mut NearFeasible,
}

impl Search<'_> {
    fn run(&mut self, v: usize, dev: i64) {
        let n = self.current.len();
        if let Some(s) = self.sum_bound {
            let (rest_lo, rest_hi) = (v..n).fold((0, 0), |(lo, hi), u| {
                let q = self.inst.capacity[u] as i64;
                (lo + self.options[u].0 - q, hi + self.options[u].1 - q)
            });
            if dev + rest_hi < -s || dev + rest_lo > s {
                return;
            }
        }
        if v == n {
            if !self.out.contains(&self.current) {
                self.out
                    .witnesses
                    .insert(self.current.clone(), self.matching.to_vec());
            }
            return;
        }
        let (lo, hi) = self.options[v];
        let q = self.inst.capacity[v] as i64;
        for value in lo..=hi {
            let sat = value == self.load[v] as i64;
            self.current[v] = value as u64;
            self.saturated[v] = sat;
            let doomed = self
                .protectors
                .iter()
                .any(|p| p.iter().all(|&u| u <= v && !self.saturated[u]));
            if !doomed {
                self.run(v + 1, dev + value - q);
            }
        }
        self.saturated[v] = false;
    }
}
