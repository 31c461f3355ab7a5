//! Weak preference orders over a finite universe of alternatives.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

/// Ordered tie-groups, most preferred first. Alternatives are indices into
/// whatever universe the owner defines (edges, students, arcs, commodities).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeakOrder {
    groups: Vec<Vec<usize>>,
    rank: HashMap<usize, usize>,
}

impl WeakOrder {
    pub fn new(groups: Vec<Vec<usize>>) -> Self {
        let mut rank = HashMap::new();
        for (g, group) in groups.iter().enumerate() {
            for &a in group {
                rank.entry(a).or_insert(g);
            }
        }
        WeakOrder { groups, rank }
    }

    /// Strict order from a best-first list.
    pub fn strict(list: impl IntoIterator<Item = usize>) -> Self {
        Self::new(list.into_iter().map(|a| vec![a]).collect())
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.iter().all(Vec::is_empty)
    }

    pub fn is_strict(&self) -> bool {
        self.groups.iter().all(|g| g.len() == 1)
    }

    /// Tie-group index of `a` (0 = most preferred).
    pub fn rank(&self, a: usize) -> Option<usize> {
        self.rank.get(&a).copied()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.rank.contains_key(&a)
    }

    /// `a ≻ b`. False when either is outside the universe.
    pub fn prefers(&self, a: usize, b: usize) -> bool {
        matches!((self.rank(a), self.rank(b)), (Some(x), Some(y)) if x < y)
    }

    /// `a ≽ b`.
    pub fn weakly_prefers(&self, a: usize, b: usize) -> bool {
        matches!((self.rank(a), self.rank(b)), (Some(x), Some(y)) if x <= y)
    }

    pub fn tied(&self, a: usize, b: usize) -> bool {
        matches!((self.rank(a), self.rank(b)), (Some(x), Some(y)) if x == y)
    }

    /// Better-first comparison (`Less` means `a` is preferred).
    pub fn compare(&self, a: usize, b: usize) -> Option<Ordering> {
        Some(self.rank(a)?.cmp(&self.rank(b)?))
    }

    pub fn universe(&self) -> BTreeSet<usize> {
        self.groups.iter().flatten().copied().collect()
    }

    /// Alternatives best-first, flattening ties in stored order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.groups.iter().flatten().copied()
    }

    /// Alternatives listed more than once, or empty groups, make the order
    /// malformed.
    pub fn is_well_formed(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.groups
            .iter()
            .all(|g| !g.is_empty() && g.iter().all(|&a| seen.insert(a)))
    }

    /// Strict refinement that orders each tie-group by ascending index.
    pub fn break_ties(&self) -> WeakOrder {
        self.break_ties_by(|a| a)
    }

    /// Strict refinement that orders each tie-group by `fallback` (ascending).
    pub fn break_ties_by<K: Ord>(&self, fallback: impl Fn(usize) -> K) -> WeakOrder {
        let mut out = Vec::with_capacity(self.len());
        for group in &self.groups {
            let mut g = group.clone();
            g.sort_by_key(|&a| fallback(a));
            out.extend(g.into_iter().map(|a| vec![a]));
        }
        WeakOrder::new(out)
    }

    /// Same order with each alternative renamed through `map`.
    pub fn map(&self, map: impl Fn(usize) -> usize) -> WeakOrder {
        WeakOrder::new(
            self.groups
                .iter()
                .map(|g| g.iter().map(|&a| map(a)).collect())
                .collect(),
        )
    }

    /// Restriction to alternatives satisfying `keep`, dropping emptied groups.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> WeakOrder {
        WeakOrder::new(
            self.groups
                .iter()
                .map(|g| g.iter().copied().filter(|&a| keep(a)).collect::<Vec<_>>())
                .filter(|g| !g.is_empty())
                .collect(),
        )
    }

    /// Appends new alternatives as strictly worse singletons, in order.
    pub fn append_worst(&mut self, alts: impl IntoIterator<Item = usize>) {
        for a in alts {
            self.rank.insert(a, self.groups.len());
            self.groups.push(vec![a]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn strict_input_is_unchanged() {
        let o = WeakOrder::strict([3, 1, 2]);
        assert_eq!(o.break_ties(), o);
    }

    #[test]
    fn tie_group_broken_by_index() {
        let o = WeakOrder::new(vec![vec![5, 2], vec![7]]);
        let s = o.break_ties();
        assert!(s.is_strict());
        assert!(s.prefers(2, 5));
        assert!(s.prefers(5, 7));
    }

    #[test]
    fn comparisons() {
        let o = WeakOrder::new(vec![vec![0], vec![1, 2], vec![3]]);
        assert!(o.prefers(0, 1));
        assert!(!o.prefers(1, 2));
        assert!(o.tied(1, 2));
        assert!(o.weakly_prefers(2, 1));
        assert!(!o.prefers(0, 9));
        assert!(!o.is_strict());
        assert_eq!(o.rank(3), Some(2));
    }

    #[test]
    fn malformed_detection() {
        assert!(!WeakOrder::new(vec![vec![0], vec![0]]).is_well_formed());
        assert!(!WeakOrder::new(vec![vec![]]).is_well_formed());
        assert!(WeakOrder::new(vec![vec![0, 1]]).is_well_formed());
    }

    fn weak_order() -> impl Strategy<Value = WeakOrder> {
        (1usize..8)
            .prop_flat_map(|n| {
                (
                    Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                    proptest::collection::vec(any::<bool>(), n),
                )
            })
            .prop_map(|(perm, cuts)| {
                let mut groups: Vec<Vec<usize>> = Vec::new();
                for (a, cut) in perm.into_iter().zip(cuts) {
                    match groups.last_mut() {
                        Some(g) if !cut => g.push(a),
                        _ => groups.push(vec![a]),
                    }
                }
                WeakOrder::new(groups)
            })
    }

    proptest! {
        #[test]
        fn break_ties_refines(o in weak_order()) {
            let s = o.break_ties();
            prop_assert!(s.is_strict());
            prop_assert_eq!(s.universe(), o.universe());
            for a in o.universe() {
                for b in o.universe() {
                    if o.prefers(a, b) {
                        prop_assert!(s.prefers(a, b));
                    }
                    if o.tied(a, b) && a < b {
                        prop_assert!(s.prefers(a, b));
                    }
                }
            }
        }
    }
}
