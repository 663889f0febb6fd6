//! Mutable basis ledger of the chain complex.
//!
//! The ledger tracks, per basis element: its live/matched status, its signed
//! boundary expression, and the live coboundary adjacency used for degree
//! queries. Collapsing a pair (σ, τ) applies the change of basis
//!
//!   τ' ↦ τ' − (⟨σ, ∂τ'⟩ / ⟨σ, ∂τ⟩) · τ
//!
//! to every other live (k+1)-element τ' incident to σ, which on boundary
//! expressions is an exact sparse update. Matched elements are never touched
//! again, so their boundary expressions freeze at match time; those frozen
//! rows are what back substitution and the acyclicity checks read.
//!
//! One fact this implementation leans on: a matching of k-chains recombines
//! only (k+1)-elements, so k-element ids keep their canonical meaning and a
//! cochain solved on them needs no re-expression at the end.

use crate::algebra::{Cochain, Id, Scalar};
use crate::complex::CellComplex;
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("elements ({low}, {high}) of dimension {dim} are not incident")]
    NotIncident { dim: usize, low: Id, high: Id },
    #[error("element {id} of dimension {dim} is not live")]
    NotLive { dim: usize, id: Id },
    #[error("no solved or supplied value for {dim}-element {id}")]
    MissingValue { dim: usize, id: Id },
    #[error("zero-block violation: live {dim}-element {id} is incident to matched element {low}")]
    ZeroBlockViolation { dim: usize, id: Id, low: Id },
    #[error("input cochain is not solenoidal (D i != 0)")]
    NotSolenoidal,
    #[error("input cochain is not curl-free (C w != 0)")]
    NotCurlFree,
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
    #[error(transparent)]
    Matching(#[from] crate::matching::MatchingError),
    #[error("internal invariant broke: {0}")]
    Internal(String),
}

/// Lifecycle of a basis element. `MatchedLow` is the σ side (set D), and
/// `MatchedHigh` the τ side (set U); elements matched at an earlier recursion
/// level are simply matched with a smaller level stamp.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Live,
    MatchedLow { level: u32 },
    MatchedHigh { level: u32 },
}

/// free = degree-1 pair (pure bookkeeping), flat = collapse that had to
/// update at least one other basis element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    Free,
    Flat,
}

impl PairKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PairKind::Free => "free",
            PairKind::Flat => "flat",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoggedPair {
    pub dim: usize,
    pub low: Id,
    pub high: Id,
    pub kind: PairKind,
    pub level: u32,
}

#[derive(Debug, Default)]
struct DimSlice {
    status: Vec<Status>,
    /// Signed boundary expression over (k-1)-ids, sorted by id.
    boundary: Vec<Vec<(Id, Scalar)>>,
    /// Live (k+1)-elements incident to this element.
    cob: Vec<HashSet<Id>>,
    live: usize,
}

#[derive(Debug)]
pub struct BasisLedger {
    dims: [DimSlice; 4],
    level: u32,
    pair_log: Vec<LoggedPair>,
    rhs: Option<(usize, Vec<Scalar>)>,
    /// k-elements whose live coboundary changed in the last collapse.
    touched: Vec<Id>,
    /// When set, every collapse re-checks ∂∂ = 0 on the updated elements.
    pub check_boundaries: bool,
}

impl BasisLedger {
    /// Ledger over the canonical basis of `complex`, everything live.
    pub fn from_complex(complex: &CellComplex) -> Self {
        let mut dims: [DimSlice; 4] = Default::default();
        for (k, slice) in dims.iter_mut().enumerate() {
            let n = complex.count(k);
            let mut boundary = Vec::with_capacity(n);
            for id in 0..n as Id {
                let mut b: Vec<(Id, Scalar)> = complex
                    .boundary(k, id)
                    .iter()
                    .map(|&(low, s)| (low, Scalar::from_int(s as i64)))
                    .collect();
                b.sort_unstable_by_key(|&(low, _)| low);
                boundary.push(b);
            }
            *slice = DimSlice {
                status: vec![Status::Live; n],
                boundary,
                cob: vec![HashSet::new(); n],
                live: n,
            };
        }
        for k in 1..4 {
            for hi in 0..dims[k].boundary.len() {
                for (low, _) in &dims[k].boundary[hi] {
                    dims[k - 1].cob[*low as usize].insert(hi as Id);
                }
            }
        }
        BasisLedger {
            dims,
            level: 0,
            pair_log: Vec::new(),
            rhs: None,
            touched: Vec::new(),
            check_boundaries: false,
        }
    }

    pub fn count(&self, k: usize) -> usize {
        self.dims[k].status.len()
    }

    pub fn live_count(&self, k: usize) -> usize {
        self.dims[k].live
    }

    pub fn status(&self, k: usize, id: Id) -> Status {
        self.dims[k].status[id as usize]
    }

    pub fn is_live(&self, k: usize, id: Id) -> bool {
        matches!(self.dims[k].status[id as usize], Status::Live)
    }

    pub fn live_ids(&self, k: usize) -> impl Iterator<Item = Id> + '_ {
        self.dims[k]
            .status
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, Status::Live))
            .map(|(i, _)| i as Id)
    }

    /// Boundary expression; frozen since match time for matched elements.
    pub fn boundary(&self, k: usize, id: Id) -> &[(Id, Scalar)] {
        &self.dims[k].boundary[id as usize]
    }

    /// ⟨low, ∂ high⟩ in the current basis.
    pub fn coefficient(&self, k: usize, high: Id, low: Id) -> Option<&Scalar> {
        let b = &self.dims[k].boundary[high as usize];
        b.binary_search_by_key(&low, |&(id, _)| id)
            .ok()
            .map(|p| &b[p].1)
    }

    /// Number of live (k+1)-elements incident to a live k-element.
    pub fn degree(&self, k: usize, id: Id) -> usize {
        self.dims[k].cob[id as usize].len()
    }

    /// Live coboundary members of a k-element.
    pub fn cofaces(&self, k: usize, id: Id) -> impl Iterator<Item = Id> + '_ {
        self.dims[k].cob[id as usize].iter().copied()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn advance_level(&mut self) {
        self.level += 1;
    }

    pub fn pair_log(&self) -> &[LoggedPair] {
        &self.pair_log
    }

    /// Attaches a right-hand-side cochain (canonical, dense over dimension
    /// `dim`); collapses of (dim-1)-pairs transport it alongside the basis.
    pub fn attach_rhs(&mut self, dim: usize, values: &Cochain) {
        assert_eq!(values.dim(), dim);
        assert_eq!(values.len(), self.count(dim));
        let vec: Vec<Scalar> = values.iter().map(|(_, v)| v.clone()).collect();
        self.rhs = Some((dim, vec));
    }

    /// Current rhs as a cochain over all ids of its dimension. Entries of
    /// matched elements are their values frozen at match time.
    pub fn rhs_cochain(&self) -> Option<Cochain> {
        self.rhs
            .as_ref()
            .map(|(dim, vals)| Cochain::from_values(*dim, vals.clone()))
    }

    pub(crate) fn drain_touched(&mut self) -> Vec<Id> {
        std::mem::take(&mut self.touched)
    }

    /// Collapses the pair (low, high): applies the basis change to every
    /// other live (k+1)-element incident to `low`, then retires both
    /// elements. Returns the pair kind (free when no update was needed).
    pub fn collapse_pair(&mut self, k: usize, low: Id, high: Id) -> Result<PairKind, SolverError> {
        if !self.is_live(k, low) {
            return Err(SolverError::NotLive { dim: k, id: low });
        }
        if !self.is_live(k + 1, high) {
            return Err(SolverError::NotLive { dim: k + 1, id: high });
        }
        let pivot = match self.coefficient(k + 1, high, low) {
            Some(v) if !v.is_zero() => v.clone(),
            _ => return Err(SolverError::NotIncident { dim: k, low, high }),
        };

        self.touched.clear();
        let others: Vec<Id> = self.dims[k].cob[low as usize]
            .iter()
            .copied()
            .filter(|&t| t != high)
            .collect();
        let kind = if others.is_empty() {
            PairKind::Free
        } else {
            PairKind::Flat
        };

        for tprime in others {
            let coeff = self
                .coefficient(k + 1, tprime, low)
                .cloned()
                .expect("cob adjacency implies incidence");
            let q = &coeff / &pivot;
            self.axpy_boundary(k + 1, tprime, &q, high);
            if let Some((rdim, vals)) = &mut self.rhs {
                if *rdim == k + 1 {
                    let delta = &q * &vals[high as usize];
                    vals[tprime as usize] -= &delta;
                }
            }
            if self.check_boundaries && !self.boundary_squared_is_zero(k + 1, tprime) {
                return Err(SolverError::Internal(format!(
                    "boundary-of-boundary broke on {}-element {} after collapsing ({low}, {high})",
                    k + 1,
                    tprime
                )));
            }
        }

        // Retire the pair: high leaves every coboundary set it appears in,
        // low leaves the coboundary sets of its own boundary.
        let high_support: Vec<Id> = self.dims[k + 1].boundary[high as usize]
            .iter()
            .map(|&(id, _)| id)
            .collect();
        for s in high_support {
            if self.dims[k].cob[s as usize].remove(&high) {
                self.touched.push(s);
            }
        }
        if k > 0 {
            let low_support: Vec<Id> = self.dims[k].boundary[low as usize]
                .iter()
                .map(|&(id, _)| id)
                .collect();
            for s in low_support {
                self.dims[k - 1].cob[s as usize].remove(&low);
            }
        }
        self.dims[k].status[low as usize] = Status::MatchedLow { level: self.level };
        self.dims[k + 1].status[high as usize] = Status::MatchedHigh { level: self.level };
        self.dims[k].live -= 1;
        self.dims[k + 1].live -= 1;
        self.pair_log.push(LoggedPair {
            dim: k,
            low,
            high,
            kind,
            level: self.level,
        });
        Ok(kind)
    }

    /// boundary[target] -= q * boundary[source], maintaining the coboundary
    /// adjacency of the affected lower elements.
    fn axpy_boundary(&mut self, k: usize, target: Id, q: &Scalar, source: Id) {
        let src = std::mem::take(&mut self.dims[k].boundary[source as usize]);
        let tgt = std::mem::take(&mut self.dims[k].boundary[target as usize]);
        let mut out: Vec<(Id, Scalar)> = Vec::with_capacity(tgt.len() + src.len());
        let (mut i, mut j) = (0, 0);
        while i < tgt.len() || j < src.len() {
            let take_tgt = j >= src.len() || (i < tgt.len() && tgt[i].0 < src[j].0);
            let take_src = i >= tgt.len() || (j < src.len() && src[j].0 < tgt[i].0);
            if take_tgt {
                out.push(tgt[i].clone());
                i += 1;
            } else if take_src {
                let (id, s) = &src[j];
                let v = -(q * s);
                debug_assert!(!v.is_zero());
                // fill-in: target becomes incident to a new lower element
                if self.dims[k - 1].cob[*id as usize].insert(target) {
                    self.touched.push(*id);
                }
                out.push((*id, v));
                j += 1;
            } else {
                let (id, t) = &tgt[i];
                let v = t - &(q * &src[j].1);
                if v.is_zero() {
                    // cancellation: incidence disappears
                    if self.dims[k - 1].cob[*id as usize].remove(&target) {
                        self.touched.push(*id);
                    }
                } else {
                    out.push((*id, v));
                }
                i += 1;
                j += 1;
            }
        }
        self.dims[k].boundary[source as usize] = src;
        self.dims[k].boundary[target as usize] = out;
    }

    /// Composes ∂∂ for one element and checks it vanishes exactly.
    pub fn boundary_squared_is_zero(&self, k: usize, id: Id) -> bool {
        if k < 2 {
            return true;
        }
        let mut acc: std::collections::BTreeMap<Id, Scalar> = std::collections::BTreeMap::new();
        for (mid, s) in &self.dims[k].boundary[id as usize] {
            for (low, t) in &self.dims[k - 1].boundary[*mid as usize] {
                let term = s * t;
                let e = acc.entry(*low).or_insert_with(Scalar::zero);
                *e += &term;
            }
        }
        acc.values().all(Scalar::is_zero)
    }

    /// The zero-block property: no live (k+1)-element may be incident to any
    /// matched k-element once a matching's collapses have been applied.
    pub fn check_zero_block(&self, k: usize) -> Result<(), SolverError> {
        for high in self.live_ids(k + 1) {
            for (low, _) in self.boundary(k + 1, high) {
                if !self.is_live(k, *low) {
                    return Err(SolverError::ZeroBlockViolation {
                        dim: k + 1,
                        id: high,
                        low: *low,
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::complex::CellComplex;

    /// The two-triangle complex: e0..e3 free, e4 shared between f0 and f1.
    pub(crate) fn double_triangle() -> CellComplex {
        // vertices v0..v3; f1 = (v0,v1,v2) with edges e0=(v0,v1), e1=(v1,v2),
        // e4=(v0,v2); f0... see test usage: faces [e0+e1-e4] and [e4+e2-e3]
        let edges = vec![
            vec![(0, -1), (1, 1)], // e0 = v0->v1
            vec![(1, -1), (2, 1)], // e1 = v1->v2
            vec![(2, -1), (3, 1)], // e2 = v2->v3
            vec![(0, -1), (3, 1)], // e3 = v0->v3
            vec![(0, -1), (2, 1)], // e4 = v0->v2
        ];
        let faces = vec![
            vec![(0, 1), (1, 1), (4, -1)], // f0 = e0 + e1 - e4
            vec![(4, 1), (2, 1), (3, -1)], // f1 = e4 + e2 - e3
        ];
        CellComplex::from_boundaries(4, None, edges, faces, vec![]).unwrap()
    }

    #[test]
    fn degrees_on_double_triangle() {
        let ledger = BasisLedger::from_complex(&double_triangle());
        assert_eq!(ledger.degree(1, 0), 1);
        assert_eq!(ledger.degree(1, 1), 1);
        assert_eq!(ledger.degree(1, 2), 1);
        assert_eq!(ledger.degree(1, 3), 1);
        assert_eq!(ledger.degree(1, 4), 2);
    }

    #[test]
    fn interior_collapse_recombines_critical_face() {
        // collapse (e4, f0): f1 <- f1 - (<e4,df1>/<e4,df0>) f0 = f1 + f0
        let mut ledger = BasisLedger::from_complex(&double_triangle());
        let kind = ledger.collapse_pair(1, 4, 0).unwrap();
        assert_eq!(kind, PairKind::Flat);
        // new boundary of f1: e0 + e1 + e2 - e3, with zero e4 coefficient
        assert_eq!(ledger.coefficient(2, 1, 4), None);
        assert_eq!(ledger.coefficient(2, 1, 0), Some(&Scalar::one()));
        assert_eq!(ledger.coefficient(2, 1, 1), Some(&Scalar::one()));
        assert_eq!(ledger.coefficient(2, 1, 2), Some(&Scalar::one()));
        assert_eq!(ledger.coefficient(2, 1, 3), Some(&Scalar::from_int(-1)));
        // e4 is incident to no live 2-element afterwards
        assert_eq!(ledger.degree(1, 4), 0);
        assert!(ledger.boundary_squared_is_zero(2, 1));
    }

    #[test]
    fn free_collapse_is_pure_bookkeeping() {
        let mut ledger = BasisLedger::from_complex(&double_triangle());
        let before = ledger.boundary(2, 1).to_vec();
        let kind = ledger.collapse_pair(1, 0, 0).unwrap();
        assert_eq!(kind, PairKind::Free);
        assert_eq!(ledger.boundary(2, 1), &before[..]);
        assert!(!ledger.is_live(1, 0));
        assert!(!ledger.is_live(2, 0));
        assert_eq!(ledger.live_count(2), 1);
    }

    #[test]
    fn collapse_rejects_non_incident_and_dead() {
        let mut ledger = BasisLedger::from_complex(&double_triangle());
        assert!(matches!(
            ledger.collapse_pair(1, 2, 0),
            Err(SolverError::NotIncident { .. })
        ));
        ledger.collapse_pair(1, 0, 0).unwrap();
        assert!(matches!(
            ledger.collapse_pair(1, 0, 1),
            Err(SolverError::NotLive { .. })
        ));
    }

    #[test]
    fn rhs_transport_follows_basis_change() {
        let mut ledger = BasisLedger::from_complex(&double_triangle());
        let mut rhs = Cochain::zeros(2, 2);
        rhs.set(0, Scalar::from_int(5)).unwrap();
        rhs.set(1, Scalar::from_int(9)).unwrap();
        ledger.attach_rhs(2, &rhs);
        ledger.collapse_pair(1, 4, 0).unwrap();
        let after = ledger.rhs_cochain().unwrap();
        // f1 became f1 + f0, so its value gains f0's
        assert_eq!(after.get(1), Some(&Scalar::from_int(14)));
        assert_eq!(after.get(0), Some(&Scalar::from_int(5)));
    }
}
