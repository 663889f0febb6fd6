//! Exact Gaussian elimination with Markowitz pivoting.
//!
//! This is the fallback solver (and the rank oracle) for residual systems the
//! matching machinery leaves behind. It is deliberately independent of the
//! collapse-based solver so the two can check each other.

use super::scalar::Scalar;
use super::sparse::{AlgebraError, Cochain, Id, SignedSparseMatrix};
use std::collections::BTreeMap;

/// Result of an elimination run: one exact solution (free variables pinned
/// to zero) plus the rank of the matrix.
#[derive(Debug, Clone)]
pub struct Elimination {
    pub solution: Cochain,
    pub rank: usize,
}

struct Workspace {
    /// row id -> active row entries (col id -> value)
    rows: BTreeMap<Id, BTreeMap<Id, Scalar>>,
    rhs: BTreeMap<Id, Scalar>,
    /// col id -> number of active rows with a nonzero in that column
    col_counts: BTreeMap<Id, usize>,
}

impl Workspace {
    fn build(a: &SignedSparseMatrix, b: Option<&Cochain>) -> Result<Self, AlgebraError> {
        let mut rows = BTreeMap::new();
        let mut rhs = BTreeMap::new();
        let mut col_counts: BTreeMap<Id, usize> = BTreeMap::new();
        for &r in a.row_ids() {
            let entries: BTreeMap<Id, Scalar> = a.row(r).map(|(c, v)| (c, v.clone())).collect();
            for c in entries.keys() {
                *col_counts.entry(*c).or_insert(0) += 1;
            }
            let bval = match b {
                Some(b) => b
                    .get(r)
                    .cloned()
                    .ok_or(AlgebraError::UnknownIndex { dim: a.row_dim(), id: r })?,
                None => Scalar::zero(),
            };
            rows.insert(r, entries);
            rhs.insert(r, bval);
        }
        Ok(Workspace { rows, rhs, col_counts })
    }

    /// Pivot minimizing (row_nnz - 1) * (col_nnz - 1); ties broken by
    /// smallest column id, then smallest row id.
    fn pick_pivot(&self) -> Option<(Id, Id)> {
        let mut best: Option<(usize, Id, Id)> = None;
        for (&r, row) in &self.rows {
            let rn = row.len();
            if rn == 0 {
                continue;
            }
            for &c in row.keys() {
                let cn = self.col_counts[&c];
                let cost = (rn - 1) * (cn - 1);
                let cand = (cost, c, r);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            }
        }
        best.map(|(_, c, r)| (r, c))
    }

    fn eliminate(&mut self, pivot_row: Id, pivot_col: Id) -> (BTreeMap<Id, Scalar>, Scalar) {
        let prow = self.rows.remove(&pivot_row).expect("pivot row active");
        let prhs = self.rhs.remove(&pivot_row).expect("pivot rhs present");
        for c in prow.keys() {
            *self.col_counts.get_mut(c).unwrap() -= 1;
        }
        let pval = prow[&pivot_col].clone();
        let targets: Vec<Id> = self
            .rows
            .iter()
            .filter(|(_, row)| row.contains_key(&pivot_col))
            .map(|(&r, _)| r)
            .collect();
        for r in targets {
            let row = self.rows.get_mut(&r).unwrap();
            let factor = &row[&pivot_col] / &pval;
            for (c, v) in &prow {
                let delta = &factor * v;
                match row.get_mut(c) {
                    Some(cur) => {
                        *cur -= &delta;
                        if cur.is_zero() {
                            row.remove(c);
                            *self.col_counts.get_mut(c).unwrap() -= 1;
                        }
                    }
                    None => {
                        if !delta.is_zero() {
                            row.insert(*c, -delta);
                            *self.col_counts.get_mut(c).unwrap() += 1;
                        }
                    }
                }
            }
            let dr = &factor * &prhs;
            *self.rhs.get_mut(&r).unwrap() -= &dr;
        }
        (prow, prhs)
    }
}

/// Solves `A x = b` exactly, or reports that `b` is not in the range of `A`.
///
/// Returns one solution with every non-pivot variable set to zero, together
/// with `rank(A)`.
pub fn exact_eliminate_solve(
    a: &SignedSparseMatrix,
    b: &Cochain,
) -> Result<Elimination, AlgebraError> {
    if b.dim() != a.row_dim() {
        return Err(AlgebraError::DimensionMismatch {
            expected: a.row_dim(),
            got: b.dim(),
        });
    }
    let mut ws = Workspace::build(a, Some(b))?;
    // (pivot col, pivot val, row entries, rhs) in elimination order
    let mut pivots: Vec<(Id, Scalar, BTreeMap<Id, Scalar>, Scalar)> = Vec::new();
    while let Some((pr, pc)) = ws.pick_pivot() {
        let (row, rhs) = ws.eliminate(pr, pc);
        let pval = row[&pc].clone();
        pivots.push((pc, pval, row, rhs));
    }
    // all remaining rows are identically zero; their rhs must be too
    for rhs in ws.rhs.values() {
        if !rhs.is_zero() {
            return Err(AlgebraError::Inconsistent);
        }
    }
    let mut solution = Cochain::zeros_over(a.col_dim(), a.col_ids().iter().copied());
    for (pc, pval, row, rhs) in pivots.iter().rev() {
        let mut acc = rhs.clone();
        for (c, v) in row {
            if c != pc {
                let x = solution.get(*c).expect("col id in domain");
                if !x.is_zero() {
                    acc -= &(v * x);
                }
            }
        }
        solution
            .set(*pc, acc / pval.clone())
            .expect("pivot col in domain");
    }
    Ok(Elimination {
        solution,
        rank: pivots.len(),
    })
}

/// Rank of `A` by the same elimination, skipping the solve.
pub fn rank(a: &SignedSparseMatrix) -> usize {
    let mut ws = Workspace::build(a, None).expect("no rhs lookups");
    let mut rank = 0;
    while let Some((pr, pc)) = ws.pick_pivot() {
        ws.eliminate(pr, pc);
        rank += 1;
    }
    rank
}
