//! The algebraic core: basis ledger and collapse transformations, back
//! substitution, residual-system extraction, the recursive vector-potential
//! solver, and the spanning-tree solvers for the gradient and divergence
//! problems.

mod ledger;

pub use ledger::{BasisLedger, LoggedPair, PairKind, SolverError, Status};

use crate::algebra::{exact_eliminate_solve, Cochain, Id, Scalar, SignedSparseMatrix};
use crate::complex::CellComplex;
use crate::matching::{
    greedy_matching, incidence_rank, spanning_tree_matching_0, spanning_tree_matching_2, Matching,
    Selection,
};
use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

/// Options for [`solve_vector_potential`].
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub selection: Selection,
    /// Re-check ∂∂ = 0 after every collapse (debug mode).
    pub check_collapses: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            selection: Selection::Ascending,
            check_collapses: false,
        }
    }
}

/// Per-recursion-level bookkeeping.
#[derive(Debug, Clone)]
pub struct LevelStats {
    pub level: u32,
    /// Live basis sizes entering the level: |B_1|, |B_2|.
    pub basis_edges: usize,
    pub basis_faces: usize,
    pub m2_pairs: usize,
    pub m1_pairs: usize,
    pub free_pairs: usize,
    pub flat_pairs: usize,
    /// Critical sets left behind: |C_1|, |C_2|.
    pub critical_edges: usize,
    pub critical_faces: usize,
    /// Fill statistic: total boundary nonzeros of the live faces entering
    /// the level. Flat collapses are the only source of growth.
    pub face_boundary_nonzeros: usize,
    pub wall: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalAction {
    /// The last level's matching was complete; pure back substitution.
    CompleteMatching,
    /// No pairs could be formed; the residual system went to the
    /// elimination solver.
    FallbackSolver,
    /// The residual system was empty.
    Empty,
}

impl TerminalAction {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminalAction::CompleteMatching => "complete-matching",
            TerminalAction::FallbackSolver => "fallback-solver",
            TerminalAction::Empty => "empty",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveTrace {
    pub levels: Vec<LevelStats>,
    pub terminal: TerminalAction,
    pub total_wall: Duration,
}

impl SolveTrace {
    /// Recursion depth: 0 when level 0 sufficed.
    pub fn depth(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    /// |B_2^(1)|, the face basis handed to the first recursive call.
    pub fn level1_face_basis(&self) -> Option<usize> {
        self.levels.get(1).map(|l| l.basis_faces)
    }
}

/// Applies a pre-built matching to the ledger, collapsing pairs in their
/// stored (witness) order.
pub fn apply_matching(ledger: &mut BasisLedger, matching: &Matching) -> Result<(), SolverError> {
    for pair in matching.pairs() {
        ledger.collapse_pair(matching.dim(), pair.low, pair.high)?;
    }
    Ok(())
}

/// Back substitution over an acyclic matching, in reverse pair order.
///
/// For pair i, h(σ_i) = ⟨σ_i, ∂τ_i⟩⁻¹ ( rhs(τ_i) − Σ ⟨σ, ∂τ_i⟩ h(σ) ), the
/// sum over the other entries of τ_i's frozen boundary. Values for critical
/// k-elements come from `supplied` (zeros at the terminal level); values for
/// later pairs are produced by the sweep itself. Runs in O(total snapshot
/// nonzeros).
pub fn back_substitution(
    matching: &Matching,
    ledger: &BasisLedger,
    rhs: &Cochain,
    supplied: &Cochain,
) -> Result<Cochain, SolverError> {
    let k = matching.dim();
    let mut values: BTreeMap<Id, Scalar> =
        supplied.iter().map(|(id, v)| (id, v.clone())).collect();
    let mut solved: Vec<(Id, Scalar)> = Vec::with_capacity(matching.len());
    for pair in matching.pairs().iter().rev() {
        let snapshot = ledger.boundary(k + 1, pair.high);
        let mut pivot: Option<&Scalar> = None;
        let mut acc = rhs
            .get(pair.high)
            .cloned()
            .ok_or(SolverError::MissingValue {
                dim: k + 1,
                id: pair.high,
            })?;
        for (low, coef) in snapshot {
            if *low == pair.low {
                pivot = Some(coef);
                continue;
            }
            match values.get(low) {
                Some(v) => {
                    if !v.is_zero() {
                        acc -= &(coef * v);
                    }
                }
                None => {
                    return Err(SolverError::MissingValue { dim: k, id: *low });
                }
            }
        }
        let pivot = pivot.ok_or(SolverError::NotIncident {
            dim: k,
            low: pair.low,
            high: pair.high,
        })?;
        let value = pivot.recip() * acc;
        values.insert(pair.low, value.clone());
        solved.push((pair.low, value));
    }
    Ok(Cochain::from_entries(k, solved))
}

/// The residual system left behind by an incomplete matching: the critical
/// block, its right-hand side, and the coupling block used while unwinding.
#[derive(Debug, Clone)]
pub struct ResidualSystem {
    /// block(D_k', C_{k+1} × C_k)
    pub matrix: SignedSparseMatrix,
    /// subvector(rhs', C_{k+1})
    pub rhs: Cochain,
    /// block(D_k', U_{k+1} × C_k)
    pub coupling: SignedSparseMatrix,
}

/// Extracts the residual blocks after a matching's collapses, first checking
/// the zero-block property block(D_k', C_{k+1} × D_k) = 0 exactly.
pub fn split_residual(
    ledger: &BasisLedger,
    matching: &Matching,
    rhs: &Cochain,
) -> Result<ResidualSystem, SolverError> {
    let k = matching.dim();
    ledger.check_zero_block(k)?;
    let live_low: BTreeSet<Id> = ledger.live_ids(k).collect();
    let live_high: BTreeSet<Id> = ledger.live_ids(k + 1).collect();
    let mut matrix = SignedSparseMatrix::new(
        k + 1,
        k,
        live_high.iter().copied(),
        live_low.iter().copied(),
    );
    for &high in &live_high {
        for (low, coef) in ledger.boundary(k + 1, high) {
            matrix.set(high, *low, coef.clone());
        }
    }
    let rhs_res = rhs.subvector(&live_high).map_err(SolverError::Algebra)?;
    let mut coupling = SignedSparseMatrix::new(
        k + 1,
        k,
        matching.high_set(),
        live_low.iter().copied(),
    );
    for pair in matching.pairs() {
        for (low, coef) in ledger.boundary(k + 1, pair.high) {
            if live_low.contains(low) {
                coupling.set(pair.high, *low, coef.clone());
            }
        }
    }
    Ok(ResidualSystem {
        matrix,
        rhs: rhs_res,
        coupling,
    })
}

/// block(D_k, U_{k+1} × D_k) from the frozen boundary snapshots.
pub fn matching_block(ledger: &BasisLedger, matching: &Matching) -> SignedSparseMatrix {
    let k = matching.dim();
    let lows = matching.low_set();
    let mut block = SignedSparseMatrix::new(
        k + 1,
        k,
        matching.high_set(),
        lows.iter().copied(),
    );
    for pair in matching.pairs() {
        for (low, coef) in ledger.boundary(k + 1, pair.high) {
            if lows.contains(low) {
                block.set(pair.high, *low, coef.clone());
            }
        }
    }
    block
}

/// True iff the matched block is upper triangular with a nonzero diagonal
/// when rows and columns are arranged in the matching's stored pair order.
pub fn block_is_upper_triangular(ledger: &BasisLedger, matching: &Matching) -> bool {
    let k = matching.dim();
    let index_of_low: BTreeMap<Id, usize> = matching
        .pairs()
        .iter()
        .enumerate()
        .map(|(i, p)| (p.low, i))
        .collect();
    for (j, pair) in matching.pairs().iter().enumerate() {
        let mut diagonal = false;
        for (low, coef) in ledger.boundary(k + 1, pair.high) {
            if let Some(&i) = index_of_low.get(low) {
                if i < j {
                    return false;
                }
                if i == j {
                    diagonal = !coef.is_zero();
                }
            }
        }
        if !diagonal {
            return false;
        }
    }
    true
}

fn expect_canonical(field: &Cochain, dim: usize, count: usize) -> Result<(), SolverError> {
    if field.dim() != dim {
        return Err(SolverError::Algebra(
            crate::algebra::AlgebraError::DimensionMismatch {
                expected: dim,
                got: field.dim(),
            },
        ));
    }
    if field.len() != count {
        return Err(SolverError::Algebra(
            crate::algebra::AlgebraError::IndexMismatch,
        ));
    }
    Ok(())
}

/// Exact residual of D_k x = b computed straight off the complex's boundary
/// lists; None means the residual is identically zero.
fn first_residual_violation(
    complex: &CellComplex,
    k: usize,
    x: &Cochain,
    b: &Cochain,
) -> Option<Id> {
    for high in 0..complex.count(k + 1) as Id {
        let mut acc = Scalar::zero();
        for &(low, s) in complex.boundary(k + 1, high) {
            let v = x.get(low).expect("canonical domain");
            if !v.is_zero() {
                acc += &(&Scalar::from_int(s as i64) * v);
            }
        }
        let want = b.get(high).expect("canonical domain");
        if &acc != want {
            return Some(high);
        }
    }
    None
}

/// Constructs a discrete vector potential h with C h = i, exactly.
///
/// Level 0 matches 2-chains greedily (falling back to the dual spanning tree
/// if the greedy pass ever stalls), then 1-chains. A complete matching of
/// 1-chains finishes by back substitution with the critical values gauged to
/// zero. Otherwise the critical sub-basis becomes the next level's input;
/// when a level produces no pairs at all the remaining residual system goes
/// to the exact elimination solver. Unwinding back-substitutes each level's
/// matched values from the values solved below it.
pub fn solve_vector_potential(
    complex: &CellComplex,
    field: &Cochain,
    opts: &SolveOptions,
) -> Result<(Cochain, SolveTrace), SolverError> {
    let started = Instant::now();
    expect_canonical(field, 2, complex.count(2))?;
    // solvability: D i = 0
    for c in 0..complex.count(3) as Id {
        let mut acc = Scalar::zero();
        for &(f, s) in complex.boundary(3, c) {
            let v = field.get(f).expect("canonical domain");
            if !v.is_zero() {
                acc += &(&Scalar::from_int(s as i64) * v);
            }
        }
        if !acc.is_zero() {
            return Err(SolverError::NotSolenoidal);
        }
    }

    let mut remaining_rank = incidence_rank(complex, 1);
    let mut ledger = BasisLedger::from_complex(complex);
    ledger.check_boundaries = opts.check_collapses;
    ledger.attach_rhs(2, field);

    let mut levels: Vec<(Matching, LevelStats)> = Vec::new();
    let terminal;
    let mut supplied: Cochain;
    loop {
        let level = ledger.level();
        let level_started = Instant::now();
        let basis_edges = ledger.live_count(1);
        let basis_faces = ledger.live_count(2);
        let face_boundary_nonzeros = ledger
            .live_ids(2)
            .map(|f| ledger.boundary(2, f).len())
            .sum();
        let m2 = if level == 0 {
            let m2 = greedy_matching(&mut ledger, 2, opts.selection);
            if ledger.live_count(3) > 0 {
                // greedy volume phase stalled (non-manifold input); redo the
                // level with the dual spanning tree construction
                ledger = BasisLedger::from_complex(complex);
                ledger.check_boundaries = opts.check_collapses;
                ledger.attach_rhs(2, field);
                let m2 = spanning_tree_matching_2(complex)?;
                apply_matching(&mut ledger, &m2)?;
                m2
            } else {
                m2
            }
        } else {
            Matching::new(2)
        };
        let m1 = greedy_matching(&mut ledger, 1, opts.selection);
        ledger.check_zero_block(1)?;
        remaining_rank = remaining_rank.saturating_sub(m1.len());
        let stats = LevelStats {
            level,
            basis_edges,
            basis_faces,
            m2_pairs: m2.len(),
            m1_pairs: m1.len(),
            free_pairs: m1.count_kind(PairKind::Free) + m2.count_kind(PairKind::Free),
            flat_pairs: m1.count_kind(PairKind::Flat) + m2.count_kind(PairKind::Flat),
            critical_edges: ledger.live_count(1),
            critical_faces: ledger.live_count(2),
            face_boundary_nonzeros,
            wall: level_started.elapsed(),
        };
        let m1_empty = m1.is_empty();
        levels.push((m1, stats));
        if remaining_rank == 0 {
            terminal = if m1_empty {
                TerminalAction::Empty
            } else {
                TerminalAction::CompleteMatching
            };
            supplied = Cochain::zeros_over(1, ledger.live_ids(1));
            break;
        }
        if m1_empty {
            // residual system for the critical sub-basis, solved exactly
            let rhs_now = ledger.rhs_cochain().expect("rhs attached");
            let residual = split_residual(&ledger, &levels.last().expect("just pushed").0, &rhs_now)?;
            let elimination = exact_eliminate_solve(&residual.matrix, &residual.rhs)?;
            terminal = TerminalAction::FallbackSolver;
            supplied = elimination.solution;
            break;
        }
        ledger.advance_level();
    }

    let rhs_snapshot = ledger.rhs_cochain().expect("rhs attached");
    for (m1, _) in levels.iter().rev() {
        if m1.is_empty() {
            continue;
        }
        let solved = back_substitution(m1, &ledger, &rhs_snapshot, &supplied)?;
        let mut merged: BTreeMap<Id, Scalar> =
            supplied.iter().map(|(id, v)| (id, v.clone())).collect();
        for (id, v) in solved.iter() {
            merged.insert(id, v.clone());
        }
        supplied = Cochain::from_entries(1, merged);
    }

    let mut h = Cochain::zeros(1, complex.count(1));
    for (id, v) in supplied.iter() {
        h.set(id, v.clone()).expect("edge id in range");
    }

    if let Some(face) = first_residual_violation(complex, 1, &h, field) {
        return Err(SolverError::Internal(format!(
            "residual C h - i is nonzero at face {face}"
        )));
    }

    let trace = SolveTrace {
        levels: levels.into_iter().map(|(_, s)| s).collect(),
        terminal,
        total_wall: started.elapsed(),
    };
    Ok((h, trace))
}

/// Discrete scalar potential: v with G v = w, given C w = 0. The spanning
/// tree matching of 0-chains is complete, so this is a single back
/// substitution; the root vertex is gauged to zero.
pub fn solve_gradient_potential(
    complex: &CellComplex,
    field: &Cochain,
) -> Result<Cochain, SolverError> {
    expect_canonical(field, 1, complex.count(1))?;
    for f in 0..complex.count(2) as Id {
        let mut acc = Scalar::zero();
        for &(e, s) in complex.boundary(2, f) {
            let v = field.get(e).expect("canonical domain");
            if !v.is_zero() {
                acc += &(&Scalar::from_int(s as i64) * v);
            }
        }
        if !acc.is_zero() {
            return Err(SolverError::NotCurlFree);
        }
    }
    let matching = spanning_tree_matching_0(complex, 0)?;
    let mut ledger = BasisLedger::from_complex(complex);
    ledger.attach_rhs(1, field);
    apply_matching(&mut ledger, &matching)?;
    let rhs = ledger.rhs_cochain().expect("rhs attached");
    let supplied = Cochain::zeros_over(0, ledger.live_ids(0));
    let solved = back_substitution(&matching, &ledger, &rhs, &supplied)?;
    let mut v = Cochain::zeros(0, complex.count(0));
    for (id, value) in solved.iter() {
        v.set(id, value.clone()).expect("vertex id in range");
    }
    if let Some(edge) = first_residual_violation(complex, 0, &v, field) {
        return Err(SolverError::Internal(format!(
            "gradient residual nonzero at edge {edge} (input curl-free but not a gradient)"
        )));
    }
    Ok(v)
}

/// Discrete "divergence potential": v with D v = q. Always solvable; the
/// dual-tree matching of 2-chains is complete and critical faces are gauged
/// to zero.
pub fn solve_divergence_potential(
    complex: &CellComplex,
    source: &Cochain,
) -> Result<Cochain, SolverError> {
    expect_canonical(source, 3, complex.count(3))?;
    let matching = spanning_tree_matching_2(complex)?;
    let mut ledger = BasisLedger::from_complex(complex);
    ledger.attach_rhs(3, source);
    apply_matching(&mut ledger, &matching)?;
    let rhs = ledger.rhs_cochain().expect("rhs attached");
    let supplied = Cochain::zeros_over(2, ledger.live_ids(2));
    let solved = back_substitution(&matching, &ledger, &rhs, &supplied)?;
    let mut v = Cochain::zeros(2, complex.count(2));
    for (id, value) in solved.iter() {
        v.set(id, value.clone()).expect("face id in range");
    }
    if let Some(volume) = first_residual_violation(complex, 2, &v, source) {
        return Err(SolverError::Internal(format!(
            "divergence residual nonzero at volume {volume}"
        )));
    }
    Ok(v)
}
