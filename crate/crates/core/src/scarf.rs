//! Scarf's complementary pivoting over exact rationals.
//!
//! Given a nonnegative `n × m` matrix `Q`, a positive bound vector `d`, and
//! for every row a strict order over the columns with a nonzero entry in that
//! row, [`solve_scarf`] returns an extreme point of `{Qx ≤ d, x ≥ 0}` that
//! dominates every column in some row.
//!
//! The working matrix is `[I | Q]`. Column ranks per row are laid out as
//!
//! ```text
//! slack i  <  nonzero columns (worst .. best)  <  zero columns  <  other slacks
//! ```
//!
//! Starting from the all-slack feasible basis and the ordinal basis
//! `{slack 1..n-1, best real column of row 0}`, the algorithm alternates
//! cardinal pivots (lexicographic ratio test) and ordinal pivots until slack 0
//! leaves the feasible basis or enters the ordinal one, at which point both
//! bases coincide.

use crate::polytope;
use crate::rational::Rational;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

pub const DEFAULT_PIVOT_BUDGET: u64 = 10_000_000;
pub const PIVOT_BUDGET_ENV: &str = "NEARSTABLE_PIVOT_BUDGET";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScarfError {
    #[error("invalid Scarf problem: {0}")]
    Invalid(String),
    #[error("pivot budget of {limit} exceeded")]
    PivotBudget { limit: u64 },
    #[error("internal Scarf failure: {0}")]
    Internal(String),
}

/// `(Q, d, row orders)` of a Scarf-type problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScarfProblem {
    matrix: Vec<Vec<Rational>>,
    bounds: Vec<Rational>,
    /// Best-first list of the nonzero columns of each row.
    row_orders: Vec<Vec<usize>>,
    /// `position[i][j]`: place of column `j` in row `i`'s order, if nonzero.
    position: Vec<Vec<Option<usize>>>,
}

impl ScarfProblem {
    pub fn new(
        matrix: Vec<Vec<Rational>>,
        bounds: Vec<Rational>,
        row_orders: Vec<Vec<usize>>,
    ) -> Result<Self, ScarfError> {
        let n = matrix.len();
        if bounds.len() != n || row_orders.len() != n {
            return Err(ScarfError::Invalid(format!(
                "{} rows, {} bounds, {} row orders",
                n,
                bounds.len(),
                row_orders.len()
            )));
        }
        let m = matrix.first().map_or(0, Vec::len);
        if matrix.iter().any(|row| row.len() != m) {
            return Err(ScarfError::Invalid("ragged matrix".into()));
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.iter().any(Signed::is_negative) {
                return Err(ScarfError::Invalid(format!("row {i} has a negative entry")));
            }
            if !bounds[i].is_positive() {
                return Err(ScarfError::Invalid(format!(
                    "bound of row {i} is not positive"
                )));
            }
        }
        for j in 0..m {
            if matrix.iter().all(|row| row[j].is_zero()) {
                return Err(ScarfError::Invalid(format!("column {j} is all zero")));
            }
        }
        let mut position = vec![vec![None; m]; n];
        for (i, order) in row_orders.iter().enumerate() {
            for (p, &j) in order.iter().enumerate() {
                if j >= m || matrix[i][j].is_zero() || position[i][j].is_some() {
                    return Err(ScarfError::Invalid(format!(
                        "row {i} order must list each nonzero column exactly once"
                    )));
                }
                position[i][j] = Some(p);
            }
            let nnz = matrix[i].iter().filter(|x| !x.is_zero()).count();
            if nnz != order.len() {
                return Err(ScarfError::Invalid(format!(
                    "row {i} order covers {} of {} nonzero columns",
                    order.len(),
                    nnz
                )));
            }
        }
        Ok(ScarfProblem {
            matrix,
            bounds,
            row_orders,
            position,
        })
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.matrix.first().map_or(0, Vec::len)
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    pub fn bounds(&self) -> &[Rational] {
        &self.bounds
    }

    pub fn row_order(&self, i: usize) -> &[usize] {
        &self.row_orders[i]
    }

    /// `a ≽_i b` for columns nonzero in row `i`.
    pub fn weakly_prefers(&self, i: usize, a: usize, b: usize) -> bool {
        matches!(
            (self.position[i][a], self.position[i][b]),
            (Some(pa), Some(pb)) if pa <= pb
        )
    }

    pub fn row_value(&self, i: usize, x: &[Rational]) -> Rational {
        self.matrix[i]
            .iter()
            .zip(x)
            .filter(|(q, _)| !q.is_zero())
            .map(|(q, v)| q * v)
            .sum()
    }
}

/// A column of the working matrix `[I | Q]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Column {
    Slack(usize),
    Real(usize),
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Column::Slack(i) => write!(f, "s{i}"),
            Column::Real(j) => write!(f, "x{j}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotKind {
    Ordinal,
    Cardinal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PivotEvent {
    pub step: u64,
    pub enter: Column,
    pub leave: Column,
    pub kind: PivotKind,
}

impl fmt::Display for PivotEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            PivotKind::Ordinal => "ordinal",
            PivotKind::Cardinal => "cardinal",
        };
        write!(
            f,
            "pivot {} enter={} leave={} kind={}",
            self.step, self.enter, self.leave, kind
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominatingPoint {
    pub x: Vec<Rational>,
    /// For each column, the lowest-index row dominating it.
    pub witness: Vec<usize>,
    pub pivots: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominationReport {
    pub feasible: bool,
    /// All rows dominating each column.
    pub witnesses: Vec<Vec<usize>>,
}

impl DominationReport {
    pub fn passes(&self) -> bool {
        self.feasible && self.witnesses.iter().all(|w| !w.is_empty())
    }

    pub fn undominated(&self) -> Vec<usize> {
        self.witnesses
            .iter()
            .enumerate()
            .filter(|(_, w)| w.is_empty())
            .map(|(j, _)| j)
            .collect()
    }
}

/// Checks feasibility and, per column, which rows dominate it: the row is
/// tight and every column it uses positively is weakly preferred there.
pub fn verify_dominating(p: &ScarfProblem, x: &[Rational]) -> DominationReport {
    let m = p.cols();
    let feasible = x.len() == m
        && x.iter().all(|v| !v.is_negative())
        && (0..p.rows()).all(|i| p.row_value(i, x) <= p.bounds[i]);
    let mut witnesses = vec![Vec::new(); m];
    if x.len() != m {
        return DominationReport {
            feasible,
            witnesses,
        };
    }
    for i in 0..p.rows() {
        if p.row_value(i, x) != p.bounds[i] {
            continue;
        }
        let used: Vec<usize> = p.row_orders[i]
            .iter()
            .copied()
            .filter(|&k| x[k].is_positive())
            .collect();
        for &j in &p.row_orders[i] {
            if used.iter().all(|&k| p.weakly_prefers(i, k, j)) {
                witnesses[j].push(i);
            }
        }
    }
    DominationReport {
        feasible,
        witnesses,
    }
}

/// True iff `x` is a vertex of `{Qx ≤ d, x ≥ 0}`: the tight rows among
/// `Q` and `-I` have full column rank.
pub fn certify_extreme(p: &ScarfProblem, x: &[Rational]) -> bool {
    let m = p.cols();
    if x.len() != m {
        return false;
    }
    let mut tight: Vec<Vec<Rational>> = Vec::new();
    for i in 0..p.rows() {
        if p.row_value(i, x) == p.bounds[i] {
            tight.push(p.matrix[i].clone());
        }
    }
    for (j, v) in x.iter().enumerate() {
        if v.is_zero() {
            let mut unit = vec![Rational::zero(); m];
            unit[j] = -Rational::from_integer(1.into());
            tight.push(unit);
        }
    }
    polytope::rank(&tight) == m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScarfSolver {
    pub pivot_budget: u64,
}

impl Default for ScarfSolver {
    fn default() -> Self {
        ScarfSolver {
            pivot_budget: DEFAULT_PIVOT_BUDGET,
        }
    }
}

impl ScarfSolver {
    pub fn with_budget(pivot_budget: u64) -> Self {
        ScarfSolver { pivot_budget }
    }

    /// Default budget, overridden by `NEARSTABLE_PIVOT_BUDGET` when it parses.
    pub fn from_env() -> Self {
        std::env::var(PIVOT_BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(Self::with_budget)
            .unwrap_or_default()
    }

    pub fn solve(&self, p: &ScarfProblem) -> Result<DominatingPoint, ScarfError> {
        self.solve_traced(p, &mut |_| {})
    }

    pub fn solve_traced(
        &self,
        p: &ScarfProblem,
        trace: &mut dyn FnMut(&PivotEvent),
    ) -> Result<DominatingPoint, ScarfError> {
        let n = p.rows();
        let m = p.cols();
        if m == 0 {
            return Ok(DominatingPoint {
                x: Vec::new(),
                witness: Vec::new(),
                pivots: 0,
            });
        }
        let mut cardinal = CardinalBasis::new(p);
        let mut ordinal = OrdinalBasis::new(p);
        let slack0 = 0usize;
        let mut entering = ordinal.initial_real_column();
        let mut pivots = 0u64;
        loop {
            pivots += 1;
            if pivots > self.pivot_budget {
                return Err(ScarfError::PivotBudget {
                    limit: self.pivot_budget,
                });
            }
            let leaving = cardinal.pivot(entering)?;
            trace(&PivotEvent {
                step: pivots,
                enter: column_ref(n, entering),
                leave: column_ref(n, leaving),
                kind: PivotKind::Cardinal,
            });
            if leaving == slack0 {
                break;
            }
            pivots += 1;
            if pivots > self.pivot_budget {
                return Err(ScarfError::PivotBudget {
                    limit: self.pivot_budget,
                });
            }
            let added = ordinal.pivot(leaving)?;
            trace(&PivotEvent {
                step: pivots,
                enter: column_ref(n, added),
                leave: column_ref(n, leaving),
                kind: PivotKind::Ordinal,
            });
            if added == slack0 {
                break;
            }
            entering = added;
        }

        let x = cardinal.real_values(m);
        let report = verify_dominating(p, &x);
        if !report.passes() {
            return Err(ScarfError::Internal(format!(
                "final basis does not dominate columns {:?}",
                report.undominated()
            )));
        }
        if !certify_extreme(p, &x) {
            return Err(ScarfError::Internal(
                "final point is not an extreme point".into(),
            ));
        }
        let witness = report.witnesses.iter().map(|w| w[0]).collect();
        Ok(DominatingPoint { x, witness, pivots })
    }
}

/// Solves with the default pivot budget.
pub fn solve_scarf(p: &ScarfProblem) -> Result<DominatingPoint, ScarfError> {
    ScarfSolver::default().solve(p)
}

fn column_ref(n: usize, col: usize) -> Column {
    if col < n {
        Column::Slack(col)
    } else {
        Column::Real(col - n)
    }
}

/// Dense tableau `B⁻¹ [I | Q | d]`. The slack block holds `B⁻¹`, which the
/// lexicographic ratio test reads directly.
struct CardinalBasis {
    n: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

impl CardinalBasis {
    fn new(p: &ScarfProblem) -> Self {
        let n = p.rows();
        let m = p.cols();
        let rows = (0..n)
            .map(|i| {
                let mut row = vec![Rational::zero(); n + m];
                row[i] = Rational::from_integer(1.into());
                row[n..].clone_from_slice(&p.matrix[i]);
                row
            })
            .collect();
        CardinalBasis {
            n,
            rows,
            rhs: p.bounds.clone(),
            basis: (0..n).collect(),
        }
    }

    /// Lexicographic comparison of `(rhs, B⁻¹ row) / pivot` between rows.
    fn lex_cmp(&self, a: usize, b: usize, col: usize) -> Ordering {
        let pa = &self.rows[a][col];
        let pb = &self.rows[b][col];
        let first = (&self.rhs[a] * pb).cmp(&(&self.rhs[b] * pa));
        if first != Ordering::Equal {
            return first;
        }
        for c in 0..self.n {
            let ord = (&self.rows[a][c] * pb).cmp(&(&self.rows[b][c] * pa));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    }

    /// Brings `col` into the basis and returns the column that leaves.
    fn pivot(&mut self, col: usize) -> Result<usize, ScarfError> {
        let mut best: Option<usize> = None;
        for r in 0..self.n {
            if !self.rows[r][col].is_positive() {
                continue;
            }
            best = match best {
                Some(b) if self.lex_cmp(r, b, col) != Ordering::Less => Some(b),
                _ => Some(r),
            };
        }
        let r = best.ok_or_else(|| {
            ScarfError::Internal(format!("column {col} has no positive pivot entry"))
        })?;
        let pivot = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v /= &pivot;
            }
        }
        self.rhs[r] /= &pivot;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.n {
            if i == r || self.rows[i][col].is_zero() {
                continue;
            }
            let factor = self.rows[i][col].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        Ok(std::mem::replace(&mut self.basis[r], col))
    }

    fn real_values(&self, m: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); m];
        for (r, &col) in self.basis.iter().enumerate() {
            if col >= self.n {
                x[col - self.n] = self.rhs[r].clone();
            }
        }
        x
    }
}

/// Ordinal basis over the ranked columns of `[I | Q]`; each member column is
/// the minimum of exactly one row.
struct OrdinalBasis {
    n: usize,
    total: usize,
    /// `rank[i][col]`, larger is better; all distinct within a row.
    rank: Vec<Vec<u32>>,
    member: Vec<bool>,
    row_min: Vec<usize>,
}

impl OrdinalBasis {
    fn new(p: &ScarfProblem) -> Self {
        let n = p.rows();
        let m = p.cols();
        let total = n + m;
        let mut rank = vec![vec![0u32; total]; n];
        for (i, ranks) in rank.iter_mut().enumerate() {
            let order = &p.row_orders[i];
            let nnz = order.len() as u32;
            for (pos, &j) in order.iter().enumerate() {
                ranks[n + j] = nnz - pos as u32;
            }
            let mut next = nnz + 1;
            for j in 0..m {
                if p.matrix[i][j].is_zero() {
                    ranks[n + j] = next;
                    next += 1;
                }
            }
            for s in 0..n {
                if s != i {
                    ranks[s] = next;
                    next += 1;
                }
            }
            ranks[i] = 0;
        }
        let mut member = vec![false; total];
        let mut row_min: Vec<usize> = (0..n).collect();
        for s in 1..n {
            member[s] = true;
        }
        let best_real = (n..total)
            .max_by_key(|&c| rank[0][c])
            .expect("at least one real column");
        member[best_real] = true;
        row_min[0] = best_real;
        OrdinalBasis {
            n,
            total,
            rank,
            member,
            row_min,
        }
    }

    fn initial_real_column(&self) -> usize {
        self.row_min[0]
    }

    /// Removes `leaving` and returns the unique column that restores an
    /// ordinal basis.
    fn pivot(&mut self, leaving: usize) -> Result<usize, ScarfError> {
        let row_of = |row_min: &[usize], col: usize| row_min.iter().position(|&c| c == col);
        let i_r = row_of(&self.row_min, leaving).ok_or_else(|| {
            ScarfError::Internal(format!("column {leaving} is not a row minimum"))
        })?;
        self.member[leaving] = false;
        let t = (0..self.total)
            .filter(|&c| self.member[c])
            .min_by_key(|&c| self.rank[i_r][c])
            .ok_or_else(|| ScarfError::Internal("ordinal basis emptied".into()))?;
        let i_t = (0..self.n)
            .find(|&i| i != i_r && self.row_min[i] == t)
            .ok_or_else(|| {
                ScarfError::Internal(format!("column {t} is not a minimum of another row"))
            })?;
        self.row_min[i_r] = t;
        let floor: Vec<u32> = (0..self.n).map(|i| self.rank[i][self.row_min[i]]).collect();
        let entering = (0..self.total)
            .filter(|&c| !self.member[c])
            .filter(|&c| (0..self.n).all(|i| i == i_t || self.rank[i][c] > floor[i]))
            .max_by_key(|&c| self.rank[i_t][c])
            .ok_or_else(|| ScarfError::Internal("no column restores the ordinal basis".into()))?;
        if self.rank[i_t][entering] >= self.rank[i_t][t] {
            return Err(ScarfError::Internal(
                "ordinal pivot would not replace the row minimum".into(),
            ));
        }
        self.member[entering] = true;
        self.row_min[i_t] = entering;
        Ok(entering)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, one, ratio, zero};

    fn q(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| int(v)).collect())
            .collect()
    }

    #[test]
    fn one_by_one() {
        let p = ScarfProblem::new(q(&[&[1]]), vec![one()], vec![vec![0]]).unwrap();
        let sol = solve_scarf(&p).unwrap();
        assert_eq!(sol.x, vec![one()]);
        assert_eq!(sol.witness, vec![0]);
    }

    /// Triangle roommates: vertex rows a, b, c then identity rows.
    fn triangle_problem() -> ScarfProblem {
        let m = q(&[
            &[1, 0, 1],
            &[1, 1, 0],
            &[0, 1, 1],
            &[1, 0, 0],
            &[0, 1, 0],
            &[0, 0, 1],
        ]);
        let orders = vec![
            vec![0, 2],
            vec![1, 0],
            vec![2, 1],
            vec![0],
            vec![1],
            vec![2],
        ];
        ScarfProblem::new(m, vec![one(); 6], orders).unwrap()
    }

    #[test]
    fn triangle_half_point() {
        let p = triangle_problem();
        let sol = solve_scarf(&p).unwrap();
        let half = ratio(1, 2);
        assert_eq!(sol.x, vec![half.clone(), half.clone(), half]);
        let report = verify_dominating(&p, &sol.x);
        // ca dominated in row a, ab in row b, bc in row c
        assert_eq!(report.witnesses[2], vec![0]);
        assert_eq!(report.witnesses[0], vec![1]);
        assert_eq!(report.witnesses[1], vec![2]);
        assert!(certify_extreme(&p, &sol.x));
    }

    #[test]
    fn zero_point_dominates_nothing() {
        let p = triangle_problem();
        let report = verify_dominating(&p, &[zero(), zero(), zero()]);
        assert!(report.feasible);
        assert_eq!(report.undominated(), vec![0, 1, 2]);
        assert!(certify_extreme(&p, &[zero(), zero(), zero()]));
    }

    #[test]
    fn midpoint_of_square_is_not_extreme() {
        let p = ScarfProblem::new(
            q(&[&[1, 0], &[0, 1]]),
            vec![one(), one()],
            vec![vec![0], vec![1]],
        )
        .unwrap();
        // midpoint of (1,0) and (1,1): only row 0 tight
        assert!(!certify_extreme(&p, &[one(), ratio(1, 2)]));
        assert!(!certify_extreme(&p, &[ratio(1, 2), ratio(1, 2)]));
        assert!(certify_extreme(&p, &[one(), one()]));
    }

    #[test]
    fn rejects_bad_problems() {
        assert!(ScarfProblem::new(q(&[&[0]]), vec![one()], vec![vec![]]).is_err());
        assert!(ScarfProblem::new(q(&[&[1]]), vec![zero()], vec![vec![0]]).is_err());
        assert!(ScarfProblem::new(q(&[&[1, 1]]), vec![one()], vec![vec![0]]).is_err());
        assert!(ScarfProblem::new(q(&[&[-1]]), vec![one()], vec![vec![0]]).is_err());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let p = triangle_problem();
        let err = ScarfSolver::with_budget(2).solve(&p).unwrap_err();
        assert_eq!(err, ScarfError::PivotBudget { limit: 2 });
    }

    #[test]
    fn trace_lines_have_fixed_shape() {
        let p = triangle_problem();
        let mut lines = Vec::new();
        ScarfSolver::default()
            .solve_traced(&p, &mut |e| lines.push(e.to_string()))
            .unwrap();
        assert!(lines[0].starts_with("pivot 1 enter=x"));
        assert!(lines[0].ends_with("kind=cardinal"));
        assert!(lines.iter().any(|l| l.ends_with("kind=ordinal")));
    }
}
