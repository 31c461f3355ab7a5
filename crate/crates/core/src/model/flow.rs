use super::{duplicate_ids, Violation};
use crate::order::WeakOrder;
use crate::rational::Rational;
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    /// Aggregate capacity `c(a)`.
    pub capacity: u64,
    /// Per-commodity capacity `c^j(a)`, indexed by commodity.
    pub commodity_capacity: Vec<u64>,
    /// The carrier's weak order over commodity indices.
    pub preferences: WeakOrder,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commodity {
    pub id: String,
    pub source: usize,
    pub sink: usize,
}

/// Stable multicommodity flow instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowInstance {
    pub vertices: Vec<String>,
    pub arcs: Vec<Arc>,
    pub commodities: Vec<Commodity>,
    /// `vertex_preferences[v][j]` ranks the arcs entering or leaving `v`
    /// for commodity `j`.
    pub vertex_preferences: Vec<Vec<WeakOrder>>,
}

/// Per-commodity arc values, `values[j][a]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiFlow {
    pub values: Vec<Vec<Rational>>,
}

impl FlowInstance {
    pub fn num_commodities(&self) -> usize {
        self.commodities.len()
    }

    pub fn out_arcs(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.arcs
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.tail == v)
            .map(|(i, _)| i)
    }

    pub fn in_arcs(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.arcs
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.head == v)
            .map(|(i, _)| i)
    }

    pub fn incident_arcs(&self, v: usize) -> BTreeSet<usize> {
        self.arcs
            .iter()
            .enumerate()
            .filter(|(_, a)| a.tail == v || a.head == v)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.vertices.len();
        let k = self.commodities.len();
        duplicate_ids("vertex", self.vertices.iter().map(String::as_str), &mut out);
        duplicate_ids("arc", self.arcs.iter().map(|a| a.id.as_str()), &mut out);
        duplicate_ids(
            "commodity",
            self.commodities.iter().map(|c| c.id.as_str()),
            &mut out,
        );
        let all_commodities: BTreeSet<usize> = (0..k).collect();
        for arc in &self.arcs {
            let entity = format!("arc {}", arc.id);
            if arc.tail >= n || arc.head >= n {
                out.push(Violation::new(
                    &entity,
                    "dangling-reference",
                    "endpoint is not a declared vertex",
                ));
            } else if arc.tail == arc.head {
                out.push(Violation::new(&entity, "self-loop", "tail equals head"));
            }
            if arc.commodity_capacity.len() != k {
                out.push(Violation::new(
                    &entity,
                    "commodity-capacity-length",
                    format!(
                        "{} commodity capacities for {} commodities",
                        arc.commodity_capacity.len(),
                        k
                    ),
                ));
            }
            if !arc.preferences.is_well_formed() || arc.preferences.universe() != all_commodities {
                out.push(Violation::new(
                    &entity,
                    "order-universe",
                    "arc order must rank every commodity exactly once",
                ));
            }
        }
        for c in &self.commodities {
            let entity = format!("commodity {}", c.id);
            if c.source >= n || c.sink >= n {
                out.push(Violation::new(
                    &entity,
                    "dangling-reference",
                    "terminal is not a declared vertex",
                ));
            } else if c.source == c.sink {
                out.push(Violation::new(
                    &entity,
                    "terminals",
                    "source and sink coincide",
                ));
            }
        }
        if self.vertex_preferences.len() != n {
            out.push(Violation::new(
                "instance",
                "preference-length",
                format!(
                    "{} vertex preference entries for {} vertices",
                    self.vertex_preferences.len(),
                    n
                ),
            ));
        }
        for (v, per_commodity) in self.vertex_preferences.iter().enumerate().take(n) {
            let entity = format!("vertex {}", self.vertices[v]);
            if per_commodity.len() != k {
                out.push(Violation::new(
                    &entity,
                    "preference-length",
                    format!("{} orders for {} commodities", per_commodity.len(), k),
                ));
                continue;
            }
            let expected = self.incident_arcs(v);
            for (j, order) in per_commodity.iter().enumerate() {
                if !order.is_well_formed() || order.universe() != expected {
                    out.push(Violation::new(
                        &entity,
                        "order-universe",
                        format!(
                            "order for commodity {} must rank exactly the incident arcs",
                            self.commodities[j].id
                        ),
                    ));
                }
            }
        }
        out
    }
}

impl MultiFlow {
    pub fn zero(commodities: usize, arcs: usize) -> Self {
        MultiFlow {
            values: vec![vec![Rational::zero(); arcs]; commodities],
        }
    }

    pub fn commodity(&self, j: usize) -> &[Rational] {
        &self.values[j]
    }

    /// `f(a) = Σ_j f^j(a)`.
    pub fn total_on(&self, arc: usize) -> Rational {
        self.values.iter().map(|f| &f[arc]).sum()
    }

    pub fn is_integral(&self) -> bool {
        self.values.iter().flatten().all(Rational::is_integer)
    }

    pub fn has_negative(&self) -> bool {
        self.values.iter().flatten().any(Rational::is_negative)
    }

    /// Net outflow of commodity `j` at its source.
    pub fn value(&self, inst: &FlowInstance, j: usize) -> Rational {
        let s = inst.commodities[j].source;
        let out: Rational = inst.out_arcs(s).map(|a| &self.values[j][a]).sum();
        let inn: Rational = inst.in_arcs(s).map(|a| &self.values[j][a]).sum();
        out - inn
    }

    /// `|f| = Σ_j |f^j|`.
    pub fn total_value(&self, inst: &FlowInstance) -> Rational {
        (0..self.values.len()).map(|j| self.value(inst, j)).sum()
    }
}
