use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevisionEntry {
    pub key: String,
    pub original: u64,
    pub revised: u64,
}

impl RevisionEntry {
    pub fn deviation(&self) -> i64 {
        self.revised as i64 - self.original as i64
    }
}

/// Revised capacities (vertex, college-set, or arc keyed) next to the
/// originals they replace.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapacityRevision {
    pub entries: Vec<RevisionEntry>,
}

impl CapacityRevision {
    pub fn from_pairs(
        keys: impl IntoIterator<Item = String>,
        original: &[u64],
        revised: &[u64],
    ) -> Self {
        CapacityRevision {
            entries: keys
                .into_iter()
                .zip(original.iter().zip(revised))
                .map(|(key, (&o, &r))| RevisionEntry {
                    key,
                    original: o,
                    revised: r,
                })
                .collect(),
        }
    }

    pub fn revised(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.revised).collect()
    }

    pub fn original(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.original).collect()
    }

    pub fn max_deviation(&self) -> u64 {
        self.entries
            .iter()
            .map(|e| e.deviation().unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn sum_deviation(&self) -> i64 {
        self.entries.iter().map(RevisionEntry::deviation).sum()
    }

    pub fn changed(&self) -> impl Iterator<Item = &RevisionEntry> {
        self.entries.iter().filter(|e| e.original != e.revised)
    }
}
