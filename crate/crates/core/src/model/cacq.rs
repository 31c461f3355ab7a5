use super::{duplicate_ids, Violation};
use crate::order::WeakOrder;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct College {
    pub id: String,
    pub quota: u64,
    /// Weak order over the indices of acceptable students.
    pub preferences: WeakOrder,
}

/// A set of colleges sharing a common quota, ranked by a master list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollegeSet {
    pub id: String,
    pub colleges: Vec<usize>,
    pub quota: u64,
    /// Weak order over student indices; must agree with every member college.
    pub master: WeakOrder,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissionEdge {
    pub id: String,
    pub student: usize,
    pub college: usize,
}

/// College admission with common quotas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacqInstance {
    pub students: Vec<String>,
    pub colleges: Vec<College>,
    /// Acceptable student-college pairs.
    pub edges: Vec<AdmissionEdge>,
    pub sets: Vec<CollegeSet>,
    /// Per student, a weak order over the indices of its incident edges.
    pub student_preferences: Vec<WeakOrder>,
}

impl CacqInstance {
    pub fn num_students(&self) -> usize {
        self.students.len()
    }

    pub fn num_colleges(&self) -> usize {
        self.colleges.len()
    }

    pub fn edge_between(&self, student: usize, college: usize) -> Option<usize> {
        self.edges
            .iter()
            .position(|e| e.student == student && e.college == college)
    }

    pub fn student_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.students.len()];
        for (i, e) in self.edges.iter().enumerate() {
            if let Some(list) = out.get_mut(e.student) {
                list.push(i);
            }
        }
        out
    }

    /// Students adjacent to each college, ascending.
    pub fn college_neighbors(&self) -> Vec<BTreeSet<usize>> {
        let mut out = vec![BTreeSet::new(); self.colleges.len()];
        for e in &self.edges {
            if let Some(set) = out.get_mut(e.college) {
                set.insert(e.student);
            }
        }
        out
    }

    /// For each college, the indices of the sets containing it.
    pub fn sets_of_college(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.colleges.len()];
        for (j, set) in self.sets.iter().enumerate() {
            for &c in &set.colleges {
                if let Some(list) = out.get_mut(c) {
                    if !list.contains(&j) {
                        list.push(j);
                    }
                }
            }
        }
        out
    }

    /// Maximum number of sets containing one college. On a normalized
    /// instance the singleton set counts, so this is at least 1.
    pub fn ell(&self) -> usize {
        self.sets_of_college()
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(0)
    }

    pub fn singleton_set_of(&self, college: usize) -> Option<usize> {
        self.sets
            .iter()
            .position(|s| s.colleges.len() == 1 && s.colleges[0] == college)
    }

    pub fn is_normalized(&self) -> bool {
        (0..self.colleges.len()).all(|c| self.singleton_set_of(c).is_some())
    }

    pub fn is_strict(&self) -> bool {
        self.student_preferences.iter().all(WeakOrder::is_strict)
            && self.sets.iter().all(|s| s.master.is_strict())
            && self.colleges.iter().all(|c| c.preferences.is_strict())
    }

    /// Ensures every college has its singleton set `{c}` carrying the
    /// college's own quota and order. Idempotent.
    pub fn normalize(&self) -> CacqInstance {
        let mut out = self.clone();
        for (c, college) in self.colleges.iter().enumerate() {
            if out.singleton_set_of(c).is_none() {
                out.sets.push(CollegeSet {
                    id: format!("{{{}}}", college.id),
                    colleges: vec![c],
                    quota: college.quota,
                    master: college.preferences.clone(),
                });
            }
        }
        out
    }

    /// Every order made strict with ties broken by ascending index. One
    /// fallback for all lists keeps master lists consistent with colleges.
    pub fn break_ties(&self) -> CacqInstance {
        CacqInstance {
            students: self.students.clone(),
            colleges: self
                .colleges
                .iter()
                .map(|c| College {
                    preferences: c.preferences.break_ties(),
                    ..c.clone()
                })
                .collect(),
            edges: self.edges.clone(),
            sets: self
                .sets
                .iter()
                .map(|s| CollegeSet {
                    master: s.master.break_ties(),
                    ..s.clone()
                })
                .collect(),
            student_preferences: self
                .student_preferences
                .iter()
                .map(WeakOrder::break_ties)
                .collect(),
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let ns = self.students.len();
        let nc = self.colleges.len();
        duplicate_ids(
            "student",
            self.students.iter().map(String::as_str),
            &mut out,
        );
        duplicate_ids(
            "college",
            self.colleges.iter().map(|c| c.id.as_str()),
            &mut out,
        );
        duplicate_ids("edge", self.edges.iter().map(|e| e.id.as_str()), &mut out);
        duplicate_ids("set", self.sets.iter().map(|s| s.id.as_str()), &mut out);

        let mut pairs = BTreeSet::new();
        for e in &self.edges {
            let entity = format!("edge {}", e.id);
            if e.student >= ns || e.college >= nc {
                out.push(Violation::new(
                    &entity,
                    "dangling-reference",
                    "edge endpoint is not a declared student or college",
                ));
            } else if !pairs.insert((e.student, e.college)) {
                out.push(Violation::new(
                    &entity,
                    "duplicate-pair",
                    format!(
                        "{} and {} are already joined by another edge",
                        self.students[e.student], self.colleges[e.college].id
                    ),
                ));
            }
        }

        if self.student_preferences.len() != ns {
            out.push(Violation::new(
                "instance",
                "preference-length",
                format!(
                    "{} student preference lists for {} students",
                    self.student_preferences.len(),
                    ns
                ),
            ));
        }
        let student_edges = self.student_edges();
        for (s, pref) in self.student_preferences.iter().enumerate().take(ns) {
            let entity = format!("student {}", self.students[s]);
            check_order(
                &entity,
                pref,
                &student_edges[s].iter().copied().collect(),
                "edge",
                &mut out,
            );
        }

        let neighbors = self.college_neighbors();
        for (c, college) in self.colleges.iter().enumerate() {
            let entity = format!("college {}", college.id);
            check_order(
                &entity,
                &college.preferences,
                &neighbors[c],
                "student",
                &mut out,
            );
        }

        for set in &self.sets {
            let entity = format!("set {}", set.id);
            if set.colleges.is_empty() {
                out.push(Violation::new(&entity, "empty-set", "set has no colleges"));
            }
            let mut members = BTreeSet::new();
            let mut union = BTreeSet::new();
            for &c in &set.colleges {
                if c >= nc {
                    out.push(Violation::new(
                        &entity,
                        "dangling-reference",
                        format!("college index {c} is not declared"),
                    ));
                    continue;
                }
                if !members.insert(c) {
                    out.push(Violation::new(
                        &entity,
                        "repeated-member",
                        format!("college {} listed twice", self.colleges[c].id),
                    ));
                }
                union.extend(neighbors[c].iter().copied());
            }
            check_order(&entity, &set.master, &union, "student", &mut out);
            if set.colleges.len() == 1 && set.colleges[0] < nc {
                let college = &self.colleges[set.colleges[0]];
                if college.quota != set.quota {
                    out.push(Violation::new(
                        &entity,
                        "singleton-quota",
                        format!(
                            "singleton quota {} differs from college {} quota {}",
                            set.quota, college.id, college.quota
                        ),
                    ));
                }
            }
            for &c in members.iter() {
                let college = &self.colleges[c];
                let order = &college.preferences;
                let ranked: Vec<usize> = order.iter().collect();
                for (i, &a) in ranked.iter().enumerate() {
                    for &b in &ranked[i + 1..] {
                        let (a, b) = if order.prefers(b, a) { (b, a) } else { (a, b) };
                        let ok = if order.tied(a, b) {
                            set.master.tied(a, b)
                        } else {
                            set.master.prefers(a, b)
                        };
                        if !ok && set.master.contains(a) && set.master.contains(b) {
                            let rel = if order.tied(a, b) { "~" } else { ">" };
                            out.push(Violation::new(
                                &entity,
                                "master-consistency",
                                format!(
                                    "college {} has {} {} {} but the master list disagrees",
                                    college.id, self.students[a], rel, self.students[b]
                                ),
                            ));
                        }
                    }
                }
            }
        }
        out
    }
}

fn check_order(
    entity: &str,
    order: &WeakOrder,
    expected: &BTreeSet<usize>,
    what: &str,
    out: &mut Vec<Violation>,
) {
    if !order.is_well_formed() {
        out.push(Violation::new(
            entity,
            "malformed-order",
            "order repeats an alternative or has an empty tie-group",
        ));
    }
    let universe = order.universe();
    if let Some(x) = universe.difference(expected).next() {
        out.push(Violation::new(
            entity,
            "order-universe",
            format!("ranks {what} #{x} which is not adjacent"),
        ));
    }
    if let Some(x) = expected.difference(&universe).next() {
        out.push(Violation::new(
            entity,
            "order-universe",
            format!("does not rank adjacent {what} #{x}"),
        ));
    }
}
