//! Sparse exact-rational vectors and matrices with id-preserving blocks.
//!
//! Matrices and cochains are indexed by cell ids, not by positions: taking a
//! block or a subvector keeps the original ids, which is what the index
//! partitions into matched/critical sets need.

use super::scalar::Scalar;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Cell / basis-element id. Ids live in per-dimension namespaces.
pub type Id = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("unknown index {id} (dimension {dim})")]
    UnknownIndex { dim: usize, id: Id },
    #[error("dimension mismatch: expected cochain of dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index sets do not match")]
    IndexMismatch,
    #[error("right-hand side is not in the range of the matrix")]
    Inconsistent,
}

/// Exact-rational cochain: dense over an explicit, sorted id domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    dim: usize,
    ids: Vec<Id>,
    vals: Vec<Scalar>,
}

impl Cochain {
    /// Zero cochain over ids `0..n`.
    pub fn zeros(dim: usize, n: usize) -> Self {
        Cochain {
            dim,
            ids: (0..n as Id).collect(),
            vals: vec![Scalar::zero(); n],
        }
    }

    /// Zero cochain over an arbitrary id set.
    pub fn zeros_over(dim: usize, ids: impl IntoIterator<Item = Id>) -> Self {
        let set: BTreeSet<Id> = ids.into_iter().collect();
        let ids: Vec<Id> = set.into_iter().collect();
        let vals = vec![Scalar::zero(); ids.len()];
        Cochain { dim, ids, vals }
    }

    pub fn from_values(dim: usize, vals: Vec<Scalar>) -> Self {
        Cochain {
            dim,
            ids: (0..vals.len() as Id).collect(),
            vals,
        }
    }

    /// Cochain over exactly the given (id, value) entries.
    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = (Id, Scalar)>) -> Self {
        let map: BTreeMap<Id, Scalar> = entries.into_iter().collect();
        let mut ids = Vec::with_capacity(map.len());
        let mut vals = Vec::with_capacity(map.len());
        for (id, v) in map {
            ids.push(id);
            vals.push(v);
        }
        Cochain { dim, ids, vals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[Id] {
        &self.ids
    }

    fn pos(&self, id: Id) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub fn contains(&self, id: Id) -> bool {
        self.pos(id).is_some()
    }

    pub fn get(&self, id: Id) -> Option<&Scalar> {
        self.pos(id).map(|p| &self.vals[p])
    }

    pub fn set(&mut self, id: Id, value: Scalar) -> Result<(), AlgebraError> {
        match self.pos(id) {
            Some(p) => {
                self.vals[p] = value;
                Ok(())
            }
            None => Err(AlgebraError::UnknownIndex { dim: self.dim, id }),
        }
    }

    pub fn add_to(&mut self, id: Id, value: &Scalar) -> Result<(), AlgebraError> {
        match self.pos(id) {
            Some(p) => {
                self.vals[p] += value;
                Ok(())
            }
            None => Err(AlgebraError::UnknownIndex { dim: self.dim, id }),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Id, &Scalar)> {
        self.ids.iter().copied().zip(self.vals.iter())
    }

    /// Nonzero entries only.
    pub fn support(&self) -> impl Iterator<Item = (Id, &Scalar)> {
        self.iter().filter(|(_, v)| !v.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.vals.iter().all(Scalar::is_zero)
    }

    /// Restriction to `ids`, preserving ids.
    pub fn subvector(&self, ids: &BTreeSet<Id>) -> Result<Cochain, AlgebraError> {
        let mut out_ids = Vec::with_capacity(ids.len());
        let mut out_vals = Vec::with_capacity(ids.len());
        for &id in ids {
            match self.pos(id) {
                Some(p) => {
                    out_ids.push(id);
                    out_vals.push(self.vals[p].clone());
                }
                None => return Err(AlgebraError::UnknownIndex { dim: self.dim, id }),
            }
        }
        Ok(Cochain {
            dim: self.dim,
            ids: out_ids,
            vals: out_vals,
        })
    }

    /// Entrywise difference; both cochains must share the same id domain.
    pub fn sub(&self, other: &Cochain) -> Result<Cochain, AlgebraError> {
        if self.dim != other.dim {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        if self.ids != other.ids {
            return Err(AlgebraError::IndexMismatch);
        }
        let vals = self
            .vals
            .iter()
            .zip(&other.vals)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Cochain {
            dim: self.dim,
            ids: self.ids.clone(),
            vals,
        })
    }
}

/// Sparse matrix with exact entries and signed-incidence flavor: row and
/// column adjacency are both maintained so row scans and column scans are
/// O(entries touched).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedSparseMatrix {
    row_dim: usize,
    col_dim: usize,
    row_ids: BTreeSet<Id>,
    col_ids: BTreeSet<Id>,
    rows: BTreeMap<Id, BTreeMap<Id, Scalar>>,
    cols: BTreeMap<Id, BTreeSet<Id>>,
}

impl SignedSparseMatrix {
    /// Empty matrix over explicit index sets. `row_dim`/`col_dim` tag which
    /// cell dimension each side is indexed by.
    pub fn new(
        row_dim: usize,
        col_dim: usize,
        row_ids: impl IntoIterator<Item = Id>,
        col_ids: impl IntoIterator<Item = Id>,
    ) -> Self {
        SignedSparseMatrix {
            row_dim,
            col_dim,
            row_ids: row_ids.into_iter().collect(),
            col_ids: col_ids.into_iter().collect(),
            rows: BTreeMap::new(),
            cols: BTreeMap::new(),
        }
    }

    pub fn row_dim(&self) -> usize {
        self.row_dim
    }

    pub fn col_dim(&self) -> usize {
        self.col_dim
    }

    pub fn row_ids(&self) -> &BTreeSet<Id> {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &BTreeSet<Id> {
        &self.col_ids
    }

    pub fn nrows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn ncols(&self) -> usize {
        self.col_ids.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.values().map(BTreeMap::len).sum()
    }

    /// Sets an entry; zero removes. Panics on ids outside the index sets,
    /// since construction sites control their ids.
    pub fn set(&mut self, row: Id, col: Id, value: Scalar) {
        assert!(self.row_ids.contains(&row), "row id {row} not in index set");
        assert!(self.col_ids.contains(&col), "col id {col} not in index set");
        if value.is_zero() {
            if let Some(r) = self.rows.get_mut(&row) {
                r.remove(&col);
                if r.is_empty() {
                    self.rows.remove(&row);
                }
            }
            if let Some(c) = self.cols.get_mut(&col) {
                c.remove(&row);
                if c.is_empty() {
                    self.cols.remove(&col);
                }
            }
        } else {
            self.rows.entry(row).or_default().insert(col, value);
            self.cols.entry(col).or_default().insert(row);
        }
    }

    pub fn get(&self, row: Id, col: Id) -> Option<&Scalar> {
        self.rows.get(&row).and_then(|r| r.get(&col))
    }

    /// Nonzero entries of one row.
    pub fn row(&self, row: Id) -> impl Iterator<Item = (Id, &Scalar)> {
        self.rows
            .get(&row)
            .into_iter()
            .flat_map(|r| r.iter().map(|(c, v)| (*c, v)))
    }

    /// Row ids with a nonzero entry in `col`.
    pub fn col(&self, col: Id) -> impl Iterator<Item = Id> + '_ {
        self.cols.get(&col).into_iter().flatten().copied()
    }

    pub fn row_nnz(&self, row: Id) -> usize {
        self.rows.get(&row).map_or(0, BTreeMap::len)
    }

    pub fn col_nnz(&self, col: Id) -> usize {
        self.cols.get(&col).map_or(0, BTreeSet::len)
    }

    pub fn entries(&self) -> impl Iterator<Item = (Id, Id, &Scalar)> {
        self.rows
            .iter()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (*r, *c, v)))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Induced submatrix, ids preserved.
    pub fn block(
        &self,
        rows: &BTreeSet<Id>,
        cols: &BTreeSet<Id>,
    ) -> Result<SignedSparseMatrix, AlgebraError> {
        for &r in rows {
            if !self.row_ids.contains(&r) {
                return Err(AlgebraError::UnknownIndex {
                    dim: self.row_dim,
                    id: r,
                });
            }
        }
        for &c in cols {
            if !self.col_ids.contains(&c) {
                return Err(AlgebraError::UnknownIndex {
                    dim: self.col_dim,
                    id: c,
                });
            }
        }
        let mut out = SignedSparseMatrix::new(
            self.row_dim,
            self.col_dim,
            rows.iter().copied(),
            cols.iter().copied(),
        );
        for &r in rows {
            if let Some(row) = self.rows.get(&r) {
                for (c, v) in row {
                    if cols.contains(c) {
                        out.set(r, *c, v.clone());
                    }
                }
            }
        }
        Ok(out)
    }

    /// Exact sparse matrix-vector product. The cochain must live on exactly
    /// this matrix's column ids.
    pub fn apply(&self, v: &Cochain) -> Result<Cochain, AlgebraError> {
        if v.dim() != self.col_dim {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.col_dim,
                got: v.dim(),
            });
        }
        if v.len() != self.col_ids.len() || !v.ids().iter().all(|id| self.col_ids.contains(id)) {
            return Err(AlgebraError::IndexMismatch);
        }
        let mut out = Cochain::zeros_over(self.row_dim, self.row_ids.iter().copied());
        for (r, row) in &self.rows {
            let mut acc = Scalar::zero();
            for (c, coeff) in row {
                let x = v.get(*c).expect("checked col ids");
                if !x.is_zero() {
                    acc += &(coeff * x);
                }
            }
            out.set(*r, acc).expect("row id in domain");
        }
        Ok(out)
    }
}
