//! Problem instances, solutions, and their validation.

mod cacq;
mod flow;
mod hypergraph;
mod revision;

pub use cacq::{AdmissionEdge, CacqInstance, College, CollegeSet};
pub use flow::{Arc, Commodity, FlowInstance, MultiFlow};
pub use hypergraph::{Hyperedge, HypergraphInstance};
pub use revision::{CapacityRevision, RevisionEntry};

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;

/// One broken invariant. Violations are data: `validate` collects all of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub entity: String,
    pub rule: String,
    pub detail: String,
}

impl Violation {
    pub fn new(entity: impl Into<String>, rule: &str, detail: impl Into<String>) -> Self {
        Violation {
            entity: entity.into(),
            rule: rule.to_string(),
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.entity, self.rule, self.detail)
    }
}

/// Any of the three instance families.
#[derive(Debug, Clone)]
pub enum Instance {
    Shm(HypergraphInstance),
    Cacq(CacqInstance),
    Smf(FlowInstance),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Shm(_) => "shm",
            Instance::Cacq(_) => "cacq",
            Instance::Smf(_) => "smf",
        }
    }
}

pub fn validate(instance: &Instance) -> Vec<Violation> {
    match instance {
        Instance::Shm(i) => i.validate(),
        Instance::Cacq(i) => i.validate(),
        Instance::Smf(i) => i.validate(),
    }
}

pub(crate) fn duplicate_ids<'a>(
    kind: &str,
    ids: impl IntoIterator<Item = &'a str>,
    out: &mut Vec<Violation>,
) {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            out.push(Violation::new(
                format!("{kind} {id}"),
                "duplicate-id",
                format!("{kind} id `{id}` is declared more than once"),
            ));
        }
    }
}
