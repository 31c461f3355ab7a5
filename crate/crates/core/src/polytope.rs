//! Exact rational linear systems: feasibility, vertices, and tight-row rank.
//!
//! A [`LinearSystem`] holds `≤`/`=` rows over nonnegative variables with
//! optional upper bounds and a set of fixed coordinates. [`extreme_point`]
//! returns a vertex of that polyhedron, either one maximizing a linear
//! objective (two-phase simplex with Bland's rule) or, without an objective,
//! one reached from a feasible warm point by purification.

use crate::rational::Rational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("linear system is malformed: {0}")]
    Invalid(String),
    #[error("linear system is infeasible")]
    Infeasible,
    #[error("objective is unbounded")]
    Unbounded,
    #[error("internal LP failure: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn lhs(&self, x: &[Rational]) -> Rational {
        dot(&self.coeffs, x)
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let v = self.lhs(x);
        match self.relation {
            Relation::Le => v <= self.rhs,
            Relation::Eq => v == self.rhs,
        }
    }

    pub fn is_tight(&self, x: &[Rational]) -> bool {
        self.lhs(x) == self.rhs
    }
}

/// Rows over `x ≥ 0` with optional upper bounds and fixed coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    num_vars: usize,
    constraints: Vec<Constraint>,
    upper: Vec<Option<Rational>>,
    fixed: BTreeMap<usize, Rational>,
}

impl LinearSystem {
    /// `num_vars` nonnegative variables with no upper bounds.
    pub fn new(num_vars: usize) -> Self {
        LinearSystem {
            num_vars,
            constraints: Vec::new(),
            upper: vec![None; num_vars],
            fixed: BTreeMap::new(),
        }
    }

    /// Variables confined to `[0, 1]`.
    pub fn unit_box(num_vars: usize) -> Self {
        let mut sys = Self::new(num_vars);
        sys.upper = vec![Some(Rational::one()); num_vars];
        sys
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn upper(&self, var: usize) -> Option<&Rational> {
        self.upper[var].as_ref()
    }

    pub fn fixed(&self) -> &BTreeMap<usize, Rational> {
        &self.fixed
    }

    pub fn set_upper(&mut self, var: usize, bound: Option<Rational>) {
        self.upper[var] = bound;
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        assert_eq!(
            coeffs.len(),
            self.num_vars,
            "row length must match variables"
        );
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn fix(&mut self, var: usize, value: Rational) {
        self.fixed.insert(var, value);
    }

    pub fn free_vars(&self) -> Vec<usize> {
        (0..self.num_vars)
            .filter(|v| !self.fixed.contains_key(v))
            .collect()
    }

    pub fn within_bounds(&self, var: usize, value: &Rational) -> bool {
        !value.is_negative() && self.upper[var].as_ref().map_or(true, |u| value <= u)
    }

    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter()
                .enumerate()
                .all(|(v, val)| self.within_bounds(v, val))
            && self.fixed.iter().all(|(&v, val)| &x[v] == val)
            && self.constraints.iter().all(|c| c.holds(x))
    }

    fn check_fixed(&self) -> Result<(), LpError> {
        for (&v, val) in &self.fixed {
            if v >= self.num_vars || !self.within_bounds(v, val) {
                return Err(LpError::Invalid(format!(
                    "fixed value of variable {v} is out of bounds"
                )));
            }
        }
        Ok(())
    }

    /// Rows tight at `x`, restricted to the free coordinates: constraint rows
    /// plus one unit row for each free variable sitting on a bound.
    fn tight_rows(&self, x: &[Rational], free: &[usize]) -> Vec<Vec<Rational>> {
        let mut rows: Vec<Vec<Rational>> = self
            .constraints
            .iter()
            .filter(|c| c.is_tight(x))
            .map(|c| free.iter().map(|&v| c.coeffs[v].clone()).collect())
            .collect();
        for (k, &v) in free.iter().enumerate() {
            let at_bound = x[v].is_zero() || self.upper[v].as_ref() == Some(&x[v]);
            if at_bound {
                let mut unit = vec![Rational::zero(); free.len()];
                unit[k] = Rational::one();
                rows.push(unit);
            }
        }
        rows
    }
}

/// Rank of the rows tight at `x`, counted over the unfixed variables.
pub fn rank_of_tight_rows(sys: &LinearSystem, x: &[Rational]) -> usize {
    let free = sys.free_vars();
    rank(&sys.tight_rows(x, &free))
}

pub fn is_vertex(sys: &LinearSystem, x: &[Rational]) -> bool {
    sys.is_feasible(x) && rank_of_tight_rows(sys, x) == sys.free_vars().len()
}

/// Exact rank by Gaussian elimination.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    reduce(rows.to_vec()).1.len()
}

/// Reduced row echelon form; returns the nonzero rows and their pivot columns.
fn reduce(mut rows: Vec<Vec<Rational>>) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let lead = rows[r][col].clone();
        for v in rows[r].iter_mut() {
            *v /= &lead;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

/// A nonzero vector in the kernel of `rows` (width `width`), if any. The
/// lowest non-pivot coordinate is set to one.
fn kernel_vector(rows: &[Vec<Rational>], width: usize) -> Option<Vec<Rational>> {
    let (reduced, pivots) = reduce(rows.to_vec());
    let free = (0..width).find(|c| !pivots.contains(c))?;
    let mut d = vec![Rational::zero(); width];
    d[free] = Rational::one();
    for (row, &p) in reduced.iter().zip(&pivots) {
        d[p] = -row[free].clone();
    }
    Some(d)
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(p, q)| !p.is_zero() && !q.is_zero())
        .map(|(p, q)| p * q)
        .sum()
}

/// A vertex of `sys`. With an objective, one maximizing it; otherwise the
/// vertex reached from `warm` by purification. `warm` must be feasible.
pub fn extreme_point(
    sys: &LinearSystem,
    objective: Option<&[Rational]>,
    warm: &[Rational],
) -> Result<Vec<Rational>, LpError> {
    sys.check_fixed()?;
    if !sys.is_feasible(warm) {
        return Err(LpError::Invalid("warm point is not feasible".into()));
    }
    let x = match objective {
        Some(c) => {
            if c.len() != sys.num_vars {
                return Err(LpError::Invalid("objective length mismatch".into()));
            }
            let x = maximize(sys, c)?;
            if dot(c, &x) < dot(c, warm) {
                return Err(LpError::Internal(
                    "optimum is worse than the warm point".into(),
                ));
            }
            x
        }
        None => purify(sys, warm)?,
    };
    if !is_vertex(sys, &x) {
        return Err(LpError::Internal(
            "returned point is not a feasible vertex".into(),
        ));
    }
    Ok(x)
}

/// Moves along kernel directions of the tight rows until they reach full rank.
fn purify(sys: &LinearSystem, warm: &[Rational]) -> Result<Vec<Rational>, LpError> {
    let free = sys.free_vars();
    let mut x = warm.to_vec();
    loop {
        let tight = sys.tight_rows(&x, &free);
        let Some(dir) = kernel_vector(&tight, free.len()) else {
            return Ok(x);
        };
        let mut d = vec![Rational::zero(); sys.num_vars];
        for (k, &v) in free.iter().enumerate() {
            d[v] = dir[k].clone();
        }
        let step = match max_step(sys, &x, &d) {
            Some(s) => s,
            None => {
                for v in d.iter_mut() {
                    *v = -v.clone();
                }
                max_step(sys, &x, &d).ok_or(LpError::Unbounded)?
            }
        };
        for (xv, dv) in x.iter_mut().zip(&d) {
            if !dv.is_zero() {
                *xv += &step * dv;
            }
        }
    }
}

/// Largest `t` keeping `x + t·d` feasible, or `None` if unbounded.
fn max_step(sys: &LinearSystem, x: &[Rational], d: &[Rational]) -> Option<Rational> {
    let mut best: Option<Rational> = None;
    let mut consider = |t: Rational| {
        if best.as_ref().map_or(true, |b| &t < b) {
            best = Some(t);
        }
    };
    for c in &sys.constraints {
        let ad = dot(&c.coeffs, d);
        if c.relation == Relation::Le && ad.is_positive() {
            consider((&c.rhs - c.lhs(x)) / ad);
        }
    }
    for (v, dv) in d.iter().enumerate() {
        if dv.is_negative() {
            consider(-&x[v] / dv);
        } else if dv.is_positive() {
            if let Some(u) = &sys.upper[v] {
                consider((u - &x[v]) / dv);
            }
        }
    }
    best
}

/// Dense simplex tableau `B⁻¹[A | b]` with an explicit basis.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        self.rhs[r] /= &p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][col].is_zero() {
                continue;
            }
            let f = self.rows[i][col].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        self.basis[r] = col;
    }

    /// Maximizes `cost · x` over columns with `allowed[j]`, Bland's rule.
    fn run(&mut self, cost: &[Rational], allowed: &[bool]) -> Result<(), LpError> {
        let width = cost.len();
        loop {
            let entering = (0..width).find(|&j| {
                allowed[j] && !self.basis.contains(&j) && {
                    let reduced: Rational = cost[j].clone()
                        - self
                            .rows
                            .iter()
                            .zip(&self.basis)
                            .filter(|(row, &b)| !row[j].is_zero() && !cost[b].is_zero())
                            .map(|(row, &b)| &cost[b] * &row[j])
                            .sum::<Rational>();
                    reduced.is_positive()
                }
            });
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                if !self.rows[r][col].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / &self.rows[r][col];
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let (r, _) = leave.ok_or(LpError::Unbounded)?;
            self.pivot(r, col);
        }
    }
}

/// Two-phase simplex over the free variables; returns an optimal basic point.
fn maximize(sys: &LinearSystem, objective: &[Rational]) -> Result<Vec<Rational>, LpError> {
    let free = sys.free_vars();
    let nf = free.len();
    let mut fixed_point = vec![Rational::zero(); sys.num_vars];
    for (&v, val) in &sys.fixed {
        fixed_point[v] = val.clone();
    }

    // Each row: coefficients over free vars, slack sign (if any), rhs.
    let mut rows: Vec<(Vec<Rational>, Option<i8>, Rational)> = Vec::new();
    for c in &sys.constraints {
        let coeffs: Vec<Rational> = free.iter().map(|&v| c.coeffs[v].clone()).collect();
        let rhs = &c.rhs - c.lhs(&fixed_point);
        let slack = (c.relation == Relation::Le).then_some(1);
        if coeffs.iter().all(Zero::is_zero) {
            let ok = match c.relation {
                Relation::Le => !rhs.is_negative(),
                Relation::Eq => rhs.is_zero(),
            };
            if !ok {
                return Err(LpError::Infeasible);
            }
            continue;
        }
        rows.push((coeffs, slack, rhs));
    }
    for (k, &v) in free.iter().enumerate() {
        if let Some(u) = &sys.upper[v] {
            let mut coeffs = vec![Rational::zero(); nf];
            coeffs[k] = Rational::one();
            rows.push((coeffs, Some(1), u.clone()));
        }
    }
    for row in rows.iter_mut() {
        if row.2.is_negative() {
            for v in row.0.iter_mut() {
                *v = -v.clone();
            }
            row.1 = row.1.map(|s| -s);
            row.2 = -row.2.clone();
        }
    }

    let n_slack = rows.iter().filter(|r| r.1.is_some()).count();
    let needs_art: Vec<bool> = rows.iter().map(|r| r.1 != Some(1)).collect();
    let n_art = needs_art.iter().filter(|&&b| b).count();
    let width = nf + n_slack + n_art;
    let mut tableau = Tableau {
        rows: Vec::with_capacity(rows.len()),
        rhs: Vec::with_capacity(rows.len()),
        basis: Vec::with_capacity(rows.len()),
    };
    let (mut next_slack, mut next_art) = (nf, nf + n_slack);
    for (i, (coeffs, slack, rhs)) in rows.into_iter().enumerate() {
        let mut row = coeffs;
        row.resize(width, Rational::zero());
        let mut basic = None;
        if let Some(sign) = slack {
            row[next_slack] = Rational::from_integer(sign.into());
            if sign == 1 {
                basic = Some(next_slack);
            }
            next_slack += 1;
        }
        if needs_art[i] {
            row[next_art] = Rational::one();
            basic = Some(next_art);
            next_art += 1;
        }
        tableau.rows.push(row);
        tableau.rhs.push(rhs);
        tableau
            .basis
            .push(basic.expect("every row has a basic column"));
    }

    let is_art = |j: usize| j >= nf + n_slack;
    if n_art > 0 {
        let cost: Vec<Rational> = (0..width)
            .map(|j| {
                if is_art(j) {
                    -Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        tableau.run(&cost, &vec![true; width])?;
        let infeasibility: Rational = tableau
            .basis
            .iter()
            .zip(&tableau.rhs)
            .filter(|(&b, _)| is_art(b))
            .map(|(_, v)| v.clone())
            .sum();
        if infeasibility.is_positive() {
            return Err(LpError::Infeasible);
        }
        let mut r = 0;
        while r < tableau.rows.len() {
            if is_art(tableau.basis[r]) {
                match (0..nf + n_slack).find(|&j| !tableau.rows[r][j].is_zero()) {
                    Some(j) => tableau.pivot(r, j),
                    None => {
                        tableau.rows.remove(r);
                        tableau.rhs.remove(r);
                        tableau.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    let mut cost = vec![Rational::zero(); width];
    for (k, &v) in free.iter().enumerate() {
        cost[k] = objective[v].clone();
    }
    let allowed: Vec<bool> = (0..width).map(|j| !is_art(j)).collect();
    tableau.run(&cost, &allowed)?;

    let mut x = fixed_point;
    for (r, &b) in tableau.basis.iter().enumerate() {
        if b < nf {
            x[free[b]] = tableau.rhs[r].clone();
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, one, ratio, zero};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn all_fixed_returns_fixed_point() {
        let mut sys = LinearSystem::unit_box(2);
        sys.add(ints(&[1, 1]), Relation::Le, int(2));
        sys.fix(0, one());
        sys.fix(1, zero());
        let x = extreme_point(&sys, Some(&ints(&[1, 1])), &[one(), zero()]).unwrap();
        assert_eq!(x, vec![one(), zero()]);
        let x = extreme_point(&sys, None, &[one(), zero()]).unwrap();
        assert_eq!(x, vec![one(), zero()]);
    }

    #[test]
    fn box_maximization_hits_all_ones() {
        let sys = LinearSystem::unit_box(3);
        let warm = vec![ratio(1, 2); 3];
        let x = extreme_point(&sys, Some(&ints(&[1, 1, 1])), &warm).unwrap();
        assert_eq!(x, vec![one(); 3]);
    }

    #[test]
    fn residual_aggregate_row_forces_half() {
        // 2(x_ab + x_bc + x_ca) = 3 with x_bc = 1, x_ca = 0
        let mut sys = LinearSystem::unit_box(3);
        sys.add(ints(&[2, 2, 2]), Relation::Eq, int(3));
        sys.fix(1, one());
        sys.fix(2, zero());
        let warm = vec![ratio(1, 2), one(), zero()];
        let x = extreme_point(&sys, Some(&ints(&[2, 2, 2])), &warm).unwrap();
        assert_eq!(x[0], ratio(1, 2));
        assert_eq!(rank_of_tight_rows(&sys, &x), 1);
    }

    #[test]
    fn interior_point_has_rank_zero() {
        let sys = LinearSystem::unit_box(2);
        assert_eq!(rank_of_tight_rows(&sys, &[ratio(1, 3), ratio(1, 2)]), 0);
    }

    #[test]
    fn odd_cycle_half_point_has_rank_three() {
        let mut sys = LinearSystem::unit_box(3);
        sys.add(ints(&[1, 0, 1]), Relation::Le, one());
        sys.add(ints(&[1, 1, 0]), Relation::Le, one());
        sys.add(ints(&[0, 1, 1]), Relation::Le, one());
        let half = vec![ratio(1, 2); 3];
        assert_eq!(rank_of_tight_rows(&sys, &half), 3);
        assert!(is_vertex(&sys, &half));
    }

    #[test]
    fn purification_reaches_a_vertex() {
        let mut sys = LinearSystem::unit_box(3);
        sys.add(ints(&[1, 1, 1]), Relation::Eq, int(1));
        let warm = vec![ratio(1, 3); 3];
        let x = extreme_point(&sys, None, &warm).unwrap();
        assert!(is_vertex(&sys, &x));
        assert!(x.iter().all(|v| v.is_integer()));
    }

    #[test]
    fn optimum_beats_warm_start() {
        let mut sys = LinearSystem::unit_box(3);
        sys.add(ints(&[1, 1, 0]), Relation::Le, one());
        sys.add(ints(&[0, 1, 1]), Relation::Le, one());
        let c = ints(&[1, 3, 1]);
        let x = extreme_point(&sys, Some(&c), &[zero(), zero(), zero()]).unwrap();
        assert_eq!(x, vec![zero(), one(), zero()]);
    }

    #[test]
    fn equality_with_negative_rhs_is_handled() {
        let mut sys = LinearSystem::new(2);
        sys.add(ints(&[-1, -1]), Relation::Eq, int(-2));
        sys.set_upper(0, Some(int(5)));
        sys.set_upper(1, Some(int(5)));
        let x = extreme_point(&sys, Some(&ints(&[1, 0])), &[one(), one()]).unwrap();
        assert_eq!(x, vec![int(2), zero()]);
    }

    #[test]
    fn infeasible_warm_is_rejected() {
        let mut sys = LinearSystem::unit_box(1);
        sys.add(ints(&[1]), Relation::Eq, one());
        assert!(matches!(
            extreme_point(&sys, None, &[zero()]),
            Err(LpError::Invalid(_))
        ));
    }
}
