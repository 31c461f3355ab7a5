use super::{duplicate_ids, Violation};
use crate::order::WeakOrder;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperedge {
    pub id: String,
    /// Vertex indices. Two edges with identical members are distinct edges.
    pub members: Vec<usize>,
}

/// Stable hypergraph matching instance. With every edge of size two this is
/// the stable fixtures problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypergraphInstance {
    pub vertices: Vec<String>,
    pub edges: Vec<Hyperedge>,
    pub capacity: Vec<u64>,
    /// Per vertex, a weak order over the indices of the edges containing it.
    pub preferences: Vec<WeakOrder>,
}

impl HypergraphInstance {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Largest edge size, at least 1.
    pub fn max_edge_size(&self) -> usize {
        self.edges
            .iter()
            .map(|e| e.members.len())
            .max()
            .unwrap_or(1)
            .max(1)
    }

    pub fn edge_size(&self, e: usize) -> usize {
        self.edges[e].members.len()
    }

    pub fn contains(&self, e: usize, v: usize) -> bool {
        self.edges[e].members.contains(&v)
    }

    /// Edge indices containing each vertex, ascending.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertices.len()];
        for (e, edge) in self.edges.iter().enumerate() {
            for &v in &edge.members {
                if let Some(list) = inc.get_mut(v) {
                    if list.last() != Some(&e) {
                        list.push(e);
                    }
                }
            }
        }
        inc
    }

    pub fn total_capacity(&self) -> u64 {
        self.capacity.iter().sum()
    }

    pub fn is_strict(&self) -> bool {
        self.preferences.iter().all(WeakOrder::is_strict)
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Same instance with every tie broken by ascending edge index.
    pub fn break_ties(&self) -> HypergraphInstance {
        HypergraphInstance {
            preferences: self.preferences.iter().map(WeakOrder::break_ties).collect(),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.vertices.len();
        duplicate_ids("vertex", self.vertices.iter().map(String::as_str), &mut out);
        duplicate_ids("edge", self.edges.iter().map(|e| e.id.as_str()), &mut out);
        if self.capacity.len() != n {
            out.push(Violation::new(
                "instance",
                "capacity-length",
                format!("{} capacities for {} vertices", self.capacity.len(), n),
            ));
        }
        if self.preferences.len() != n {
            out.push(Violation::new(
                "instance",
                "preference-length",
                format!(
                    "{} preference lists for {} vertices",
                    self.preferences.len(),
                    n
                ),
            ));
        }
        for edge in &self.edges {
            let entity = format!("edge {}", edge.id);
            if edge.members.is_empty() {
                out.push(Violation::new(&entity, "empty-edge", "edge has no members"));
            }
            let mut seen = BTreeSet::new();
            for &v in &edge.members {
                if v >= n {
                    out.push(Violation::new(
                        &entity,
                        "dangling-reference",
                        format!("member index {v} is not a vertex"),
                    ));
                } else if !seen.insert(v) {
                    out.push(Violation::new(
                        &entity,
                        "repeated-member",
                        format!("vertex {} listed twice", self.vertices[v]),
                    ));
                }
            }
        }
        let inc = self.incidence();
        for (v, pref) in self.preferences.iter().enumerate().take(n) {
            let entity = format!("vertex {}", self.vertices[v]);
            if !pref.is_well_formed() {
                out.push(Violation::new(
                    &entity,
                    "malformed-order",
                    "preference list repeats an edge or has an empty tie-group",
                ));
            }
            let universe = pref.universe();
            let expected: BTreeSet<usize> = inc[v].iter().copied().collect();
            for e in universe.difference(&expected) {
                let name = self
                    .edges
                    .get(*e)
                    .map(|x| x.id.clone())
                    .unwrap_or_else(|| format!("#{e}"));
                out.push(Violation::new(
                    &entity,
                    "order-universe",
                    format!("ranks edge {name} which does not contain the vertex"),
                ));
            }
            for e in expected.difference(&universe) {
                out.push(Violation::new(
                    &entity,
                    "order-universe",
                    format!("does not rank incident edge {}", self.edges[*e].id),
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::triangle;

    #[test]
    fn triangle_is_valid() {
        let t = triangle();
        assert!(t.validate().is_empty());
        assert_eq!(t.max_edge_size(), 2);
        assert!(t.is_strict());
    }

    #[test]
    fn unknown_vertex_is_one_violation() {
        let mut t = triangle();
        t.edges[0].members[1] = 9;
        // the order of `b` still ranks edge ab, which no longer contains b
        let v: Vec<_> = t
            .validate()
            .into_iter()
            .filter(|v| v.rule == "dangling-reference")
            .collect();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].entity, "edge ab");
    }

    #[test]
    fn missing_incident_edge_reported() {
        let mut t = triangle();
        t.preferences[0] = WeakOrder::strict([0]);
        let v = t.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, "order-universe");
    }
}
