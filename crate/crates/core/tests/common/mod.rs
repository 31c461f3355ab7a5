//! Stability checkers written directly from the definitions, sharing no code
//! with the library's verifiers.
#![allow(dead_code)]

use nearstable::model::{CacqInstance, FlowInstance, HypergraphInstance, MultiFlow};
use nearstable::rational::Rational;
use num_traits::{Signed, Zero};

fn loads(inst: &HypergraphInstance, matching: &[bool]) -> Vec<u64> {
    let mut out = vec![0; inst.vertices.len()];
    for (e, edge) in inst.edges.iter().enumerate() {
        if matching[e] {
            for &v in &edge.members {
                out[v] += 1;
            }
        }
    }
    out
}

/// Edges blocking an integral hypergraph matching: an unused edge where
/// every member is unsaturated or holds some strictly worse edge.
pub fn shm_blocking(inst: &HypergraphInstance, cap: &[u64], matching: &[bool]) -> Vec<usize> {
    let load = loads(inst, matching);
    (0..inst.edges.len())
        .filter(|&f| !matching[f])
        .filter(|&f| {
            inst.edges[f].members.iter().all(|&v| {
                load[v] < cap[v]
                    || (0..inst.edges.len()).any(|g| {
                        matching[g]
                            && inst.edges[g].members.contains(&v)
                            && inst.preferences[v].prefers(f, g)
                    })
            })
        })
        .collect()
}

pub fn shm_stable(inst: &HypergraphInstance, cap: &[u64], matching: &[bool]) -> bool {
    loads(inst, matching).iter().zip(cap).all(|(l, c)| l <= c)
        && shm_blocking(inst, cap, matching).is_empty()
}

/// College admission with common quotas over a normalized instance.
pub fn cacq_blocking(inst: &CacqInstance, quota: &[u64], matching: &[bool]) -> Vec<usize> {
    let in_set = |set: usize, college: usize| inst.sets[set].colleges.contains(&college);
    let set_load = |set: usize| -> u64 {
        inst.edges
            .iter()
            .enumerate()
            .filter(|(e, edge)| matching[*e] && in_set(set, edge.college))
            .count() as u64
    };
    (0..inst.edges.len())
        .filter(|&e| !matching[e])
        .filter(|&e| {
            let s = inst.edges[e].student;
            let c = inst.edges[e].college;
            let held: Vec<usize> = (0..inst.edges.len())
                .filter(|&g| matching[g] && inst.edges[g].student == s)
                .collect();
            let student_wants = held.is_empty()
                || held
                    .iter()
                    .any(|&g| inst.student_preferences[s].prefers(e, g));
            student_wants
                && (0..inst.sets.len()).filter(|&j| in_set(j, c)).all(|j| {
                    set_load(j) < quota[j]
                        || inst.edges.iter().enumerate().any(|(g, edge)| {
                            matching[g]
                                && in_set(j, edge.college)
                                && inst.sets[j].master.prefers(s, edge.student)
                        })
                })
        })
        .collect()
}

pub fn cacq_feasible(inst: &CacqInstance, quota: &[u64], matching: &[bool]) -> bool {
    let per_student = (0..inst.students.len()).all(|s| {
        inst.edges
            .iter()
            .enumerate()
            .filter(|(e, edge)| matching[*e] && edge.student == s)
            .count()
            <= 1
    });
    let per_set = inst.sets.iter().enumerate().all(|(j, set)| {
        let load = inst
            .edges
            .iter()
            .enumerate()
            .filter(|(e, edge)| matching[*e] && set.colleges.contains(&edge.college))
            .count() as u64;
        load <= quota[j]
    });
    per_student && per_set
}

/// Feasibility of a multicommodity flow under the given capacities: values
/// nonnegative, conserved away from the terminals, within both capacity
/// families.
pub fn flow_feasible(inst: &FlowInstance, agg: &[u64], per: &[Vec<u64>], f: &MultiFlow) -> bool {
    let k = inst.commodities.len();
    for j in 0..k {
        for (a, v) in f.values[j].iter().enumerate() {
            if v.is_negative() || v > &Rational::from_integer(per[j][a].into()) {
                return false;
            }
        }
        let c = &inst.commodities[j];
        for v in 0..inst.vertices.len() {
            if v == c.source || v == c.sink {
                continue;
            }
            let mut balance = Rational::zero();
            for (a, arc) in inst.arcs.iter().enumerate() {
                if arc.head == v {
                    balance += &f.values[j][a];
                }
                if arc.tail == v {
                    balance -= &f.values[j][a];
                }
            }
            if !balance.is_zero() {
                return false;
            }
        }
    }
    (0..inst.arcs.len()).all(|a| {
        let total: Rational = (0..k).map(|j| f.values[j][a].clone()).sum();
        total <= Rational::from_integer(agg[a].into())
    })
}

/// True when some walk blocks `f` for some commodity. Arc-to-arc
/// reachability is a transitive closure over usable arcs; a blocking walk
/// exists iff a valid first arc reaches a valid last arc.
pub fn flow_blocked(inst: &FlowInstance, agg: &[u64], per: &[Vec<u64>], f: &MultiFlow) -> bool {
    let k = inst.commodities.len();
    let m = inst.arcs.len();
    for j in 0..k {
        let (s, t) = (inst.commodities[j].source, inst.commodities[j].sink);
        let usable: Vec<bool> = (0..m)
            .map(|a| {
                let room = f.values[j][a] < Rational::from_integer(per[j][a].into());
                let total: Rational = (0..k).map(|i| f.values[i][a].clone()).sum();
                let saturated = total == Rational::from_integer(agg[a].into());
                let displaces = (0..k).any(|i| {
                    i != j && f.values[i][a].is_positive() && inst.arcs[a].preferences.prefers(j, i)
                });
                room && (!saturated || displaces)
            })
            .collect();
        let pref = |v: usize| &inst.vertex_preferences[v][j];
        let first = |a: usize| {
            let v = inst.arcs[a].tail;
            v == s
                || (0..m).any(|b| {
                    inst.arcs[b].tail == v && f.values[j][b].is_positive() && pref(v).prefers(a, b)
                })
        };
        let last = |a: usize| {
            let v = inst.arcs[a].head;
            v == t
                || (0..m).any(|b| {
                    inst.arcs[b].head == v && f.values[j][b].is_positive() && pref(v).prefers(a, b)
                })
        };
        let mut reach = vec![vec![false; m]; m];
        for a in 0..m {
            for b in 0..m {
                reach[a][b] =
                    usable[a] && usable[b] && (a == b || inst.arcs[a].head == inst.arcs[b].tail);
            }
        }
        for mid in 0..m {
            for a in 0..m {
                if reach[a][mid] {
                    for b in 0..m {
                        if reach[mid][b] {
                            reach[a][b] = true;
                        }
                    }
                }
            }
        }
        for a in (0..m).filter(|&a| first(a)) {
            for b in (0..m).filter(|&b| last(b)) {
                if reach[a][b] {
                    return true;
                }
            }
        }
    }
    false
}

/// Every one-to-one matching of a complete `n × n` market, as edge flags
/// (`edge m * n + w`), via all partial injections.
pub fn all_marriages(n: usize) -> Vec<Vec<bool>> {
    fn extend(
        m: usize,
        n: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<bool>,
        out: &mut Vec<Vec<bool>>,
    ) {
        if m == n {
            out.push(cur.clone());
            return;
        }
        extend(m + 1, n, used, cur, out);
        for w in 0..n {
            if !used[w] {
                used[w] = true;
                cur[m * n + w] = true;
                extend(m + 1, n, used, cur, out);
                cur[m * n + w] = false;
                used[w] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(0, n, &mut vec![false; n], &mut vec![false; n * n], &mut out);
    out
}

/// Gale-Shapley with men proposing; returns the woman of each man.
pub fn deferred_acceptance(men: &[Vec<usize>], women: &[Vec<usize>]) -> Vec<usize> {
    let n = men.len();
    let rank = |w: usize, m: usize| women[w].iter().position(|&x| x == m).unwrap();
    let mut next = vec![0; n];
    let mut holds: Vec<Option<usize>> = vec![None; n];
    let mut free: Vec<usize> = (0..n).rev().collect();
    while let Some(m) = free.pop() {
        let w = men[m][next[m]];
        next[m] += 1;
        match holds[w] {
            None => holds[w] = Some(m),
            Some(o) if rank(w, m) < rank(w, o) => {
                holds[w] = Some(m);
                free.push(o);
            }
            Some(_) => free.push(m),
        }
    }
    let mut wife = vec![0; n];
    for (w, m) in holds.iter().enumerate() {
        wife[m.unwrap()] = w;
    }
    wife
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}
