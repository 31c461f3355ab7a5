//! College admission with common quotas.
//!
//! Set rows carry the common quotas and student rows keep every student at
//! most once. Rounding drops set rows one at a time (non-tight rows with
//! fractional mass at most `2ℓ − 1` first, then tight rows with mass at most
//! `2ℓ`), never touching student rows, and students fully assigned at the
//! dominating point stay assigned.

use crate::error::{Error, Result};
use crate::model::{CacqInstance, CapacityRevision};
use crate::polytope::{self, LinearSystem, Relation};
use crate::rational::{int, Rational};
use crate::scarf::{DominatingPoint, PivotEvent, ScarfProblem, ScarfSolver};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

/// Scarf problem with set rows then student rows. Edges whose college sits
/// in a zero-quota set have no column; rows without columns are dropped.
#[derive(Debug, Clone)]
pub struct CacqScarf {
    pub problem: ScarfProblem,
    pub column_edge: Vec<usize>,
    pub edge_column: Vec<Option<usize>>,
    pub set_row: Vec<Option<usize>>,
    pub student_row: Vec<Option<usize>>,
}

impl CacqScarf {
    pub fn edge_vector(&self, x: &[Rational]) -> Vec<Rational> {
        self.edge_column
            .iter()
            .map(|c| c.map_or_else(Rational::zero, |c| x[c].clone()))
            .collect()
    }
}

/// Requires a normalized instance with strict orders.
pub fn build_cacq_scarf(inst: &CacqInstance) -> Result<CacqScarf> {
    if !inst.is_normalized() || !inst.is_strict() {
        return Err(Error::Precondition(
            "Scarf matrix needs a normalized instance with strict orders".into(),
        ));
    }
    let sets_of = inst.sets_of_college();
    let mut edge_column = vec![None; inst.edges.len()];
    let mut column_edge = Vec::new();
    for (e, edge) in inst.edges.iter().enumerate() {
        if sets_of[edge.college]
            .iter()
            .all(|&j| inst.sets[j].quota > 0)
        {
            edge_column[e] = Some(column_edge.len());
            column_edge.push(e);
        }
    }
    let m = column_edge.len();
    let mut matrix = Vec::new();
    let mut bounds = Vec::new();
    let mut orders = Vec::new();
    let mut set_row = vec![None; inst.sets.len()];
    for (j, set) in inst.sets.iter().enumerate() {
        let mut cols: Vec<usize> = (0..m)
            .filter(|&c| set.colleges.contains(&inst.edges[column_edge[c]].college))
            .collect();
        if set.quota == 0 || cols.is_empty() {
            continue;
        }
        // master list first, then the student's own order
        cols.sort_by_key(|&c| {
            let e = &inst.edges[column_edge[c]];
            (
                set.master.rank(e.student),
                inst.student_preferences[e.student].rank(column_edge[c]),
            )
        });
        let mut row = vec![Rational::zero(); m];
        for &c in &cols {
            row[c] = Rational::one();
        }
        set_row[j] = Some(matrix.len());
        matrix.push(row);
        bounds.push(int(set.quota as i64));
        orders.push(cols);
    }
    let mut student_row = vec![None; inst.students.len()];
    for (s, pref) in inst.student_preferences.iter().enumerate() {
        let cols: Vec<usize> = pref.iter().filter_map(|e| edge_column[e]).collect();
        if cols.is_empty() {
            continue;
        }
        let mut row = vec![Rational::zero(); m];
        for &c in &cols {
            row[c] = Rational::one();
        }
        student_row[s] = Some(matrix.len());
        matrix.push(row);
        bounds.push(Rational::one());
        orders.push(cols);
    }
    let problem = ScarfProblem::new(matrix, bounds, orders)?;
    Ok(CacqScarf {
        problem,
        column_edge,
        edge_column,
        set_row,
        student_row,
    })
}

/// `Q_{C_j} x` for every set.
pub fn set_loads(inst: &CacqInstance, x: &[Rational]) -> Vec<Rational> {
    inst.sets
        .iter()
        .map(|set| {
            inst.edges
                .iter()
                .zip(x)
                .filter(|(e, v)| !v.is_zero() && set.colleges.contains(&e.college))
                .map(|(_, v)| v.clone())
                .sum()
        })
        .collect()
}

/// `Q_{s_k} x` for every student.
pub fn student_loads(inst: &CacqInstance, x: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); inst.students.len()];
    for (e, v) in inst.edges.iter().zip(x) {
        out[e.student] += v;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CacqStep {
    pub set: String,
    pub tight: bool,
    pub fractional_mass: usize,
    pub fractional_before: usize,
    pub fractional_after: usize,
}

/// Iterative rounding of a dominating point of a normalized strict instance.
pub fn round_cacq(
    inst: &CacqInstance,
    x_star: &[Rational],
) -> Result<(Vec<Rational>, Vec<CacqStep>)> {
    let m = inst.edges.len();
    let ell = inst.ell();
    let pinned: Vec<bool> = student_loads(inst, x_star)
        .iter()
        .map(One::is_one)
        .collect();
    let student_edges = inst.student_edges();
    let set_members: Vec<Vec<usize>> = inst
        .sets
        .iter()
        .map(|set| {
            (0..m)
                .filter(|&e| set.colleges.contains(&inst.edges[e].college))
                .collect()
        })
        .collect();

    let mut z = x_star.to_vec();
    let mut active = vec![true; inst.sets.len()];
    let mut steps = Vec::new();
    let fractional = |z: &[Rational]| z.iter().filter(|v| !v.is_integer()).count();
    while fractional(&z) > 0 {
        let before = fractional(&z);
        let mass = |j: usize| {
            set_members[j]
                .iter()
                .filter(|&&e| !z[e].is_integer())
                .count()
        };
        let load = |j: usize| -> Rational { set_members[j].iter().map(|&e| z[e].clone()).sum() };
        let tight = |j: usize| load(j) == int(inst.sets[j].quota as i64);
        let pick = (0..inst.sets.len())
            .find(|&j| active[j] && !tight(j) && mass(j) < 2 * ell)
            .or_else(|| {
                (0..inst.sets.len()).find(|&j| active[j] && tight(j) && mass(j) <= 2 * ell)
            });
        let Some(j) = pick else {
            return Err(Error::Internal(format!(
                "no set row can be deleted with {before} fractional components"
            )));
        };
        let was_tight = tight(j);
        let fractional_mass = mass(j);
        active[j] = false;

        let mut sys = LinearSystem::unit_box(m);
        for (j, members) in set_members.iter().enumerate() {
            if active[j] {
                let mut row = vec![Rational::zero(); m];
                for &e in members {
                    row[e] = Rational::one();
                }
                sys.add(row, Relation::Le, int(inst.sets[j].quota as i64));
            }
        }
        for (s, edges) in student_edges.iter().enumerate() {
            if edges.is_empty() {
                continue;
            }
            let mut row = vec![Rational::zero(); m];
            for &e in edges {
                row[e] = Rational::one();
            }
            let rel = if pinned[s] {
                Relation::Eq
            } else {
                Relation::Le
            };
            sys.add(row, rel, Rational::one());
        }
        for (e, v) in z.iter().enumerate() {
            if v.is_integer() {
                sys.fix(e, v.clone());
            }
        }
        z = polytope::extreme_point(&sys, None, &z)?;
        steps.push(CacqStep {
            set: inst.sets[j].id.clone(),
            tight: was_tight,
            fractional_mass,
            fractional_before: before,
            fractional_after: fractional(&z),
        });
        if steps.len() > inst.sets.len() {
            return Err(Error::Internal(
                "rounding deleted more rows than there are sets".into(),
            ));
        }
    }
    Ok((z, steps))
}

/// `q'(C_j) = Q_{C_j} y` where `x*` fills `C_j`, else `max(q(C_j), Q_{C_j} y)`.
pub fn compute_cacq_quotas(
    inst: &CacqInstance,
    x_star: &[Rational],
    y: &[Rational],
) -> Result<Vec<u64>> {
    for (e, (xs, ys)) in x_star.iter().zip(y).enumerate() {
        if !ys.is_integer() || ys.is_negative() {
            return Err(Error::Precondition(format!(
                "value of edge {} is not a nonnegative integer",
                inst.edges[e].id
            )));
        }
        if xs.is_zero() && !ys.is_zero() {
            return Err(Error::Precondition(format!(
                "support containment: edge {} is used but has zero fractional value",
                inst.edges[e].id
            )));
        }
    }
    let star = student_loads(inst, x_star);
    let rounded = student_loads(inst, y);
    for (s, (a, b)) in star.iter().zip(&rounded).enumerate() {
        let ok = if a.is_one() {
            b.is_one()
        } else {
            b <= &Rational::one()
        };
        if !ok {
            return Err(Error::Precondition(format!(
                "student assignment: student {} has load {} (fractional load {})",
                inst.students[s], b, a
            )));
        }
    }
    let at_star = set_loads(inst, x_star);
    let at_y = set_loads(inst, y);
    Ok(inst
        .sets
        .iter()
        .enumerate()
        .map(|(j, set)| {
            let load = at_y[j].to_integer().try_into().unwrap_or(u64::MAX);
            if at_star[j] == int(set.quota as i64) {
                load
            } else {
                load.max(set.quota)
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotaExcess {
    pub set: String,
    pub load: u64,
    pub quota: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CacqVerdict {
    pub overassigned_students: Vec<String>,
    pub quota_violations: Vec<QuotaExcess>,
    pub blocking_edges: Vec<String>,
}

impl CacqVerdict {
    pub fn passes(&self) -> bool {
        self.overassigned_students.is_empty()
            && self.quota_violations.is_empty()
            && self.blocking_edges.is_empty()
    }
}

/// Blocking edges of an integral matching on a normalized instance, with
/// `quotas` indexed like `inst.sets`.
pub fn blocking_edges(inst: &CacqInstance, quotas: &[u64], matching: &[bool]) -> Vec<usize> {
    let sets_of = inst.sets_of_college();
    let assigned: Vec<Vec<usize>> = {
        let mut out = vec![Vec::new(); inst.students.len()];
        for (e, edge) in inst.edges.iter().enumerate() {
            if matching[e] {
                out[edge.student].push(e);
            }
        }
        out
    };
    let admitted: Vec<Vec<usize>> = inst
        .sets
        .iter()
        .map(|set| {
            inst.edges
                .iter()
                .enumerate()
                .filter(|(e, edge)| matching[*e] && set.colleges.contains(&edge.college))
                .map(|(_, edge)| edge.student)
                .collect()
        })
        .collect();
    (0..inst.edges.len())
        .filter(|&e| !matching[e])
        .filter(|&e| {
            let s = inst.edges[e].student;
            let pref = &inst.student_preferences[s];
            let student_wants =
                assigned[s].is_empty() || assigned[s].iter().any(|&g| pref.prefers(e, g));
            student_wants
                && sets_of[inst.edges[e].college].iter().all(|&j| {
                    (admitted[j].len() as u64) < quotas[j]
                        || admitted[j]
                            .iter()
                            .any(|&t| inst.sets[j].master.prefers(s, t))
                })
        })
        .collect()
}

/// Student overload, quota violations and blocking edges. The instance is
/// normalized first; `quotas` must follow the normalized set order.
pub fn verify_cacq(inst: &CacqInstance, quotas: &[u64], matching: &[bool]) -> CacqVerdict {
    let inst = inst.normalize();
    let mut per_student = vec![0usize; inst.students.len()];
    for (e, edge) in inst.edges.iter().enumerate() {
        if matching[e] {
            per_student[edge.student] += 1;
        }
    }
    let overassigned_students = per_student
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 1)
        .map(|(s, _)| inst.students[s].clone())
        .collect();
    let ones: Vec<Rational> = matching.iter().map(|&b| int(b as i64)).collect();
    let quota_violations = set_loads(&inst, &ones)
        .iter()
        .enumerate()
        .filter_map(|(j, load)| {
            let load: u64 = load.to_integer().try_into().unwrap_or(u64::MAX);
            (load > quotas[j]).then(|| QuotaExcess {
                set: inst.sets[j].id.clone(),
                load,
                quota: quotas[j],
            })
        })
        .collect();
    CacqVerdict {
        overassigned_students,
        quota_violations,
        blocking_edges: blocking_edges(&inst, quotas, matching)
            .into_iter()
            .map(|e| inst.edges[e].id.clone())
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetQuota {
    pub set: String,
    pub quota: u64,
    pub revised: u64,
    pub tight_at_fractional: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CacqBounds {
    pub ell: usize,
    pub max_deviation: u64,
    pub max_deviation_ok: bool,
    pub pinned_students: Vec<String>,
    pub pinned_unmatched: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct CacqSolution {
    /// Normalized instance the solution refers to.
    pub instance: CacqInstance,
    pub revision: CapacityRevision,
    pub sets: Vec<SetQuota>,
    pub matching: Vec<bool>,
    pub fractional: Vec<Rational>,
    pub pivots: u64,
    pub steps: Vec<CacqStep>,
    pub verdict: CacqVerdict,
    pub bounds: CacqBounds,
}

impl CacqSolution {
    pub fn passes(&self) -> bool {
        self.verdict.passes()
            && self.bounds.max_deviation_ok
            && self.bounds.pinned_unmatched.is_empty()
    }
}

pub fn solve_cacq(inst: &CacqInstance) -> Result<CacqSolution> {
    solve_cacq_with(inst, &ScarfSolver::from_env(), &mut |_| {})
}

pub fn solve_cacq_with(
    inst: &CacqInstance,
    solver: &ScarfSolver,
    trace: &mut dyn FnMut(&PivotEvent),
) -> Result<CacqSolution> {
    let violations = inst.validate();
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let normalized = inst.normalize();
    let strict = normalized.break_ties();
    let scarf = build_cacq_scarf(&strict)?;
    let DominatingPoint { x, pivots, .. } = solver.solve_traced(&scarf.problem, trace)?;
    let x_star = scarf.edge_vector(&x);
    let (z, steps) = round_cacq(&strict, &x_star)?;
    let revised = compute_cacq_quotas(&strict, &x_star, &z)?;
    let matching: Vec<bool> = z.iter().map(One::is_one).collect();
    let verdict = verify_cacq(&normalized, &revised, &matching);

    let loads = set_loads(&normalized, &x_star);
    let sets = normalized
        .sets
        .iter()
        .zip(&revised)
        .zip(&loads)
        .map(|((set, &r), load)| SetQuota {
            set: set.id.clone(),
            quota: set.quota,
            revised: r,
            tight_at_fractional: load == &int(set.quota as i64),
        })
        .collect();
    let pinned: Vec<usize> = student_loads(&normalized, &x_star)
        .iter()
        .enumerate()
        .filter(|(_, l)| l.is_one())
        .map(|(s, _)| s)
        .collect();
    let matched = student_loads(&normalized, &z);
    let ell = normalized.ell();
    let revision = CapacityRevision::from_pairs(
        normalized.sets.iter().map(|s| s.id.clone()),
        &normalized.sets.iter().map(|s| s.quota).collect::<Vec<_>>(),
        &revised,
    );
    let max_deviation = revision.max_deviation();
    let bounds = CacqBounds {
        ell,
        max_deviation,
        max_deviation_ok: max_deviation < 2 * ell.max(1) as u64,
        pinned_students: pinned
            .iter()
            .map(|&s| normalized.students[s].clone())
            .collect(),
        pinned_unmatched: pinned
            .iter()
            .filter(|&&s| !matched[s].is_one())
            .map(|&s| normalized.students[s].clone())
            .collect(),
    };
    Ok(CacqSolution {
        instance: normalized,
        revision,
        sets,
        matching,
        fractional: x_star,
        pivots,
        steps,
        verdict,
        bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{cacq_common_quota, hungarian_style};

    #[test]
    fn common_quota_matrix_shape() {
        let inst = cacq_common_quota().normalize();
        let s = build_cacq_scarf(&inst).unwrap();
        assert_eq!(s.problem.rows(), 5);
        assert_eq!(s.problem.cols(), 4);
    }

    #[test]
    fn set_row_ties_use_student_preference() {
        let mut inst = cacq_common_quota();
        // s1 now prefers c2; the common row must list s1c2 before s1c1
        inst.student_preferences[0] = crate::order::WeakOrder::strict([1, 0]);
        let inst = inst.normalize();
        let s = build_cacq_scarf(&inst).unwrap();
        let common = s.set_row[0].unwrap();
        assert_eq!(s.problem.row_order(common), &[1, 0, 2, 3]);
    }

    #[test]
    fn empty_matching_is_blocked_everywhere() {
        let inst = cacq_common_quota().normalize();
        let quotas: Vec<u64> = inst.sets.iter().map(|s| s.quota).collect();
        let v = verify_cacq(&inst, &quotas, &[false; 4]);
        assert_eq!(v.blocking_edges.len(), 4);
    }

    #[test]
    fn top_student_at_top_college_is_stable() {
        let inst = cacq_common_quota().normalize();
        let quotas: Vec<u64> = inst.sets.iter().map(|s| s.quota).collect();
        let v = verify_cacq(&inst, &quotas, &[true, false, false, false]);
        assert!(v.passes(), "{v:?}");
    }

    #[test]
    fn common_quota_pipeline_keeps_quotas() {
        let sol = solve_cacq(&cacq_common_quota()).unwrap();
        assert!(sol.passes());
        assert_eq!(sol.bounds.max_deviation, 0);
        assert_eq!(sol.matching, vec![true, false, false, false]);
    }

    #[test]
    fn hungarian_pipeline_within_three() {
        let sol = solve_cacq(&hungarian_style()).unwrap();
        assert!(sol.passes(), "{:?}", sol.verdict);
        assert_eq!(sol.bounds.ell, 2);
        assert!(sol.bounds.max_deviation <= 3);
    }

    #[test]
    fn quota_max_clause_for_loose_rows() {
        let inst = cacq_common_quota().normalize();
        let x = vec![int(0); 4];
        let q = compute_cacq_quotas(&inst, &x, &x).unwrap();
        assert_eq!(q, vec![1, 1, 1]);
    }

    #[test]
    fn support_violation_is_named() {
        let inst = cacq_common_quota().normalize();
        let x = vec![int(0); 4];
        let y = vec![int(1), int(0), int(0), int(0)];
        let err = compute_cacq_quotas(&inst, &x, &y).unwrap_err();
        assert!(err.to_string().contains("support containment"));
    }
}
