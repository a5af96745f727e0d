//! The three matrix operations on `FB(d)`, replayable operation sequences,
//! the exhaustive closure oracle and witness construction.
//!
//! * `op1`: conjugation by a permutation matrix, a relabelling of vertices.
//! * `op2`: at vertex `k`, negate column `k` and add `A[k][j] * column k` to
//!   every other column `j`. Flips the signs of all child edges of `k`.
//! * `op3`: when row `l` is zero and row `k` is `±e^l`, flip the sign of
//!   the root edge `{l, k}`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::forest::{CodeMode, SignedRootedForest};
use crate::linalg::IntMatrix;
use crate::matrix::{enumerate, FanoBottMatrix, MatrixError};
use crate::perm::Permutation;
use crate::sign::Sign;
use crate::wire;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpError {
    #[error("vertex {} is out of range for dimension {dim}", .index + 1)]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("permutation has size {perm}, matrix has dimension {dim}")]
    PermutationSize { perm: usize, dim: usize },
    #[error("root-edge flip at ({}, {}) not applicable: {reason}", .k + 1, .l + 1)]
    PreconditionFailed {
        k: usize,
        l: usize,
        reason: Op3Precondition,
    },
    #[error("relabelling leaves FB(d): {0}")]
    LeavesFb(MatrixError),
    #[error("dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("witnesses exist only for the variety and diffeo modes")]
    UnsupportedMode,
}

/// Which half of the root-edge flip precondition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op3Precondition {
    /// Row `l` has a nonzero entry, so `l` is not a root.
    TargetRowNotZero,
    /// Row `k` is not `±e^l`, so `k` is not a child of `l`.
    SourceRowNotUnit,
    /// `k == l`.
    SameIndex,
}

impl fmt::Display for Op3Precondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Op3Precondition::TargetRowNotZero => "row l is not zero",
            Op3Precondition::SourceRowNotUnit => "row k is not a signed unit row e^l",
            Op3Precondition::SameIndex => "k and l coincide",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {} failed: {source}", .index + 1)]
pub struct ReplayError {
    pub index: usize,
    pub source: OpError,
}

/// One operation of a witness.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OpStep {
    /// `op1`: relabel vertex `i` as `perm(i)`.
    Permute(Permutation),
    /// `op2` at vertex `k`.
    FlipChildren(usize),
    /// `op3` on the edge from `child` (row `k`) to the root `root` (row `l`).
    FlipRootEdge { child: usize, root: usize },
}

impl OpStep {
    /// The step undoing this one. `op2` and `op3` are involutions.
    pub fn inverse(&self) -> OpStep {
        match self {
            OpStep::Permute(p) => OpStep::Permute(p.inverse()),
            other => other.clone(),
        }
    }
}

impl fmt::Display for OpStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpStep::Permute(p) => write!(f, "op1 {p}"),
            OpStep::FlipChildren(k) => write!(f, "op2 {}", k + 1),
            OpStep::FlipRootEdge { child, root } => write!(f, "op3 {} {}", child + 1, root + 1),
        }
    }
}

/// A replayable equivalence witness between two matrices, identified by
/// their digests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpSequence {
    pub steps: Vec<OpStep>,
    pub source_sha: String,
    pub target_sha: String,
}

impl OpSequence {
    pub fn new(source: &FanoBottMatrix, target: &FanoBottMatrix, steps: Vec<OpStep>) -> Self {
        Self {
            steps,
            source_sha: digest(source),
            target_sha: digest(target),
        }
    }
}

/// SHA-256 (hex) of the compact matrix JSON.
pub fn digest(a: &FanoBottMatrix) -> String {
    let json = serde_json::to_string(&wire::MatrixJson::from(a)).expect("matrix serializes");
    hex::encode(Sha256::digest(json.as_bytes()))
}

/// `P A P^{-1}`: entry `(i, j)` moves to `(perm(i), perm(j))`. The result
/// need not lie in `FB(d)`.
pub fn op1(a: &IntMatrix, perm: &Permutation) -> IntMatrix {
    assert!(a.is_square(), "op1 needs a square matrix");
    assert_eq!(perm.len(), a.rows(), "permutation size mismatch");
    let d = a.rows();
    let mut out = IntMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            out.set(perm.apply(i), perm.apply(j), a.get(i, j));
        }
    }
    out
}

/// `op2` at `k`. Always stays inside `FB(d)`.
pub fn op2(a: &FanoBottMatrix, k: usize) -> Result<FanoBottMatrix, OpError> {
    let d = a.dim();
    if k >= d {
        return Err(OpError::IndexOutOfRange { index: k, dim: d });
    }
    let mut out = IntMatrix::zeros(d, d);
    for i in 0..d {
        let aik = a.get(i, k);
        for j in 0..d {
            let v = if j == k {
                -aik
            } else {
                a.get(i, j) + a.get(k, j) * aik
            };
            out.set(i, j, v);
        }
    }
    Ok(FanoBottMatrix::from_trusted(out))
}

/// `op3` at `(k, l)`: requires row `l` zero and row `k = ±e^l`.
pub fn op3(a: &FanoBottMatrix, k: usize, l: usize) -> Result<FanoBottMatrix, OpError> {
    let d = a.dim();
    for index in [k, l] {
        if index >= d {
            return Err(OpError::IndexOutOfRange { index, dim: d });
        }
    }
    let fail = |reason| Err(OpError::PreconditionFailed { k, l, reason });
    if k == l {
        return fail(Op3Precondition::SameIndex);
    }
    if !a.row_is_zero(l) {
        return fail(Op3Precondition::TargetRowNotZero);
    }
    let unit = a
        .row(k)
        .iter()
        .enumerate()
        .all(|(j, &v)| if j == l { v != 0 } else { v == 0 });
    if !unit {
        return fail(Op3Precondition::SourceRowNotUnit);
    }
    let mut out = a.as_int_matrix().clone();
    out.set(k, l, -a.get(k, l));
    for i in (0..d).filter(|&i| i != l && i != k) {
        let aik = a.get(i, k);
        if aik != 0 {
            out.set(i, l, aik * a.get(i, l));
        }
    }
    Ok(FanoBottMatrix::from_trusted(out))
}

pub fn apply_step(a: &FanoBottMatrix, step: &OpStep) -> Result<FanoBottMatrix, OpError> {
    match step {
        OpStep::Permute(p) => {
            if p.len() != a.dim() {
                return Err(OpError::PermutationSize {
                    perm: p.len(),
                    dim: a.dim(),
                });
            }
            FanoBottMatrix::validate(&op1(a.as_int_matrix(), p)).map_err(OpError::LeavesFb)
        }
        OpStep::FlipChildren(k) => op2(a, *k),
        OpStep::FlipRootEdge { child, root } => op3(a, *child, *root),
    }
}

/// Applies `steps` in order; every intermediate matrix is validated.
pub fn replay(a: &FanoBottMatrix, steps: &[OpStep]) -> Result<FanoBottMatrix, ReplayError> {
    steps
        .iter()
        .enumerate()
        .try_fold(a.clone(), |cur, (index, step)| {
            apply_step(&cur, step).map_err(|source| ReplayError { index, source })
        })
}

/// Which operations generate the closure graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpSet {
    pub permute: bool,
    pub flip_children: bool,
    pub flip_root_edge: bool,
}

impl OpSet {
    /// All three operations: Fano Bott equivalence.
    pub const ALL: OpSet = OpSet {
        permute: true,
        flip_children: true,
        flip_root_edge: true,
    };
    /// `op1` and `op2` only: isomorphism as varieties.
    pub const VARIETY: OpSet = OpSet {
        permute: true,
        flip_children: true,
        flip_root_edge: false,
    };
}

/// A partition of `FB(d)` into classes, in enumeration order.
#[derive(Debug, Clone)]
pub struct Partition {
    pub matrices: Vec<FanoBottMatrix>,
    /// Class index of each matrix.
    pub class_of: Vec<usize>,
    /// Member indices per class; classes are ordered by their first member.
    pub classes: Vec<Vec<usize>>,
}

impl Partition {
    /// Groups `matrices` by a key, numbering classes by first occurrence.
    pub fn by_key<K, F>(matrices: Vec<FanoBottMatrix>, key: F) -> Partition
    where
        K: std::hash::Hash + Eq + Send,
        F: Fn(&FanoBottMatrix) -> K + Sync,
    {
        let keys: Vec<K> = matrices.par_iter().map(&key).collect();
        let mut ids: HashMap<K, usize> = HashMap::new();
        let mut class_of = Vec::with_capacity(matrices.len());
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (i, k) in keys.into_iter().enumerate() {
            let next = ids.len();
            let c = *ids.entry(k).or_insert(next);
            if c == classes.len() {
                classes.push(Vec::new());
            }
            classes[c].push(i);
            class_of.push(c);
        }
        Partition {
            matrices,
            class_of,
            classes,
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// True when both partitions group the same matrices together. Both
    /// must be over the same matrix list.
    pub fn same_as(&self, other: &Partition) -> bool {
        self.matrices == other.matrices && self.classes == other.classes
    }
}

/// All matrices reachable from `a` in one step of the given operations.
pub fn neighbours(a: &FanoBottMatrix, ops: OpSet, perms: &[Permutation]) -> Vec<FanoBottMatrix> {
    let d = a.dim();
    let mut out = Vec::new();
    if ops.flip_children {
        out.extend((0..d).map(|k| op2(a, k).expect("k in range")));
    }
    if ops.flip_root_edge {
        for k in 0..d {
            for l in 0..d {
                if let Ok(b) = op3(a, k, l) {
                    out.push(b);
                }
            }
        }
    }
    if ops.permute {
        for p in perms {
            if let Ok(b) = FanoBottMatrix::validate(&op1(a.as_int_matrix(), p)) {
                out.push(b);
            }
        }
    }
    out
}

/// Connected components of `FB(d)` under `ops`, found by breadth-first
/// search over raw matrices. Every permutation of `0..d` is tried as an
/// `op1` edge, so keep `d <= 5`.
pub fn closure_classes(d: usize, ops: OpSet) -> Partition {
    let matrices: Vec<FanoBottMatrix> = enumerate(d).collect();
    let index: HashMap<&FanoBottMatrix, usize> =
        matrices.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let perms = if ops.permute {
        Permutation::all(d)
    } else {
        Vec::new()
    };
    let adjacency: Vec<Vec<usize>> = matrices
        .par_iter()
        .map(|m| {
            neighbours(m, ops, &perms)
                .iter()
                .map(|b| index[b])
                .collect()
        })
        .collect();

    let mut class_of = vec![usize::MAX; matrices.len()];
    let mut classes = Vec::new();
    for start in 0..matrices.len() {
        if class_of[start] != usize::MAX {
            continue;
        }
        let c = classes.len();
        let mut members = vec![start];
        class_of[start] = c;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adjacency[v] {
                if class_of[w] == usize::MAX {
                    class_of[w] = c;
                    members.push(w);
                    queue.push_back(w);
                }
            }
        }
        members.sort_unstable();
        classes.push(members);
    }
    drop(index);
    Partition {
        matrices,
        class_of,
        classes,
    }
}

/// Fano Bott equivalence classes of `FB(d)` by exhaustive search.
pub fn bfs_closure_classes(d: usize) -> Partition {
    closure_classes(d, OpSet::ALL)
}

/// Steps taking `a` to the canonical representative of its class, and that
/// representative.
///
/// Child-edge signs are first brought to their canonical orientation with
/// `op2`; in diffeo mode every root edge is then made `+` with `op3`; a
/// single `op1` finally moves to canonical labels.
pub fn canonical_route(
    a: &FanoBottMatrix,
    mode: CodeMode,
) -> Result<(Vec<OpStep>, FanoBottMatrix), OpError> {
    if mode == CodeMode::RootedIso {
        return Err(OpError::UnsupportedMode);
    }
    let forest = SignedRootedForest::from_matrix(a);
    let orient = forest.orientation(mode);
    let mut steps = Vec::new();
    let mut cur = a.clone();
    for v in (0..a.dim()).filter(|&v| orient.flip[v]) {
        steps.push(OpStep::FlipChildren(v));
        cur = op2(&cur, v)?;
    }
    if mode == CodeMode::Diffeo {
        let t = SignedRootedForest::from_matrix(&cur);
        for child in 0..t.size() {
            if let Some(e) = t.edge(child) {
                if t.is_root(e.parent) && e.sign == Sign::Minus {
                    steps.push(OpStep::FlipRootEdge {
                        child,
                        root: e.parent,
                    });
                    cur = op3(&cur, child, e.parent)?;
                }
            }
        }
    }
    let perm = SignedRootedForest::from_matrix(&cur).canonical_labeling(mode);
    if !perm.is_identity() {
        cur = apply_step(&cur, &OpStep::Permute(perm.clone()))?;
        steps.push(OpStep::Permute(perm));
    }
    Ok((steps, cur))
}

/// Cancels adjacent inverse pairs and merges consecutive relabellings.
fn simplify(steps: Vec<OpStep>) -> Vec<OpStep> {
    let mut out: Vec<OpStep> = Vec::with_capacity(steps.len());
    for step in steps {
        match (out.last(), &step) {
            (Some(OpStep::Permute(p)), OpStep::Permute(q)) => {
                let merged = p.then(q);
                out.pop();
                if !merged.is_identity() {
                    out.push(OpStep::Permute(merged));
                }
            }
            (Some(prev), _) if *prev == step && !matches!(step, OpStep::Permute(_)) => {
                out.pop();
            }
            _ => {
                if !matches!(&step, OpStep::Permute(p) if p.is_identity()) {
                    out.push(step);
                }
            }
        }
    }
    out
}

/// A sequence of operations from `a` to `b` in the given mode, or `None`
/// when the two are not equivalent. `Diffeo` uses all three operations,
/// `Variety` only `op1` and `op2`.
pub fn find_witness_in(
    a: &FanoBottMatrix,
    b: &FanoBottMatrix,
    mode: CodeMode,
) -> Result<Option<OpSequence>, OpError> {
    if a.dim() != b.dim() {
        return Err(OpError::DimensionMismatch(a.dim(), b.dim()));
    }
    let (to_canon, canon_a) = canonical_route(a, mode)?;
    let (from_b, canon_b) = canonical_route(b, mode)?;
    if canon_a != canon_b {
        return Ok(None);
    }
    let mut steps = to_canon;
    steps.extend(from_b.iter().rev().map(OpStep::inverse));
    let steps = simplify(steps);
    debug_assert_eq!(replay(a, &steps).as_ref(), Ok(b));
    Ok(Some(OpSequence::new(a, b, steps)))
}

/// A Fano Bott equivalence witness from `a` to `b`, if one exists.
pub fn find_witness(a: &FanoBottMatrix, b: &FanoBottMatrix) -> Result<Option<OpSequence>, OpError> {
    find_witness_in(a, b, CodeMode::Diffeo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a6() -> FanoBottMatrix {
        FanoBottMatrix::from_rows(&[
            [0, 0, 1, 0, 0, 0],
            [0, 0, -1, 0, 0, -1],
            [0, 0, 0, 0, 0, -1],
            [0, 0, 0, 0, -1, 1],
            [0, 0, 0, 0, 0, 1],
            [0, 0, 0, 0, 0, 0],
        ])
        .unwrap()
    }

    #[test]
    fn op1_identity_and_reversal() {
        let a = a6();
        assert_eq!(op1(a.as_int_matrix(), &Permutation::identity(6)), *a.as_int_matrix());
        let b = FanoBottMatrix::from_rows(&[[0, 1], [0, 0]]).unwrap();
        let rev = op1(b.as_int_matrix(), &Permutation::transposition(2, 0, 1));
        assert_eq!(rev.to_rows(), vec![vec![0, 0], vec![1, 0]]);
        assert!(matches!(
            apply_step(&b, &OpStep::Permute(Permutation::transposition(2, 0, 1))),
            Err(OpError::LeavesFb(MatrixError::NotUpperTriangular { row: 1, col: 0 }))
        ));
    }

    #[test]
    fn op2_on_leaf_with_zero_column_is_identity() {
        let a = a6();
        // vertex 1 is a leaf and column 1 is zero
        assert_eq!(op2(&a, 0).unwrap(), a);
        assert!(op2(&a, 6).is_err());
    }

    #[test]
    fn op3_preconditions() {
        let a = a6();
        assert_eq!(
            op3(&a, 3, 5).unwrap_err(),
            OpError::PreconditionFailed {
                k: 3,
                l: 5,
                reason: Op3Precondition::SourceRowNotUnit
            }
        );
        assert_eq!(
            op3(&a, 0, 2).unwrap_err(),
            OpError::PreconditionFailed {
                k: 0,
                l: 2,
                reason: Op3Precondition::TargetRowNotZero
            }
        );
        assert!(matches!(
            op3(&a, 5, 5),
            Err(OpError::PreconditionFailed {
                reason: Op3Precondition::SameIndex,
                ..
            })
        ));
    }

    #[test]
    fn op3_two_by_two_is_an_involution() {
        let b = FanoBottMatrix::from_rows(&[[0, 1], [0, 0]]).unwrap();
        let c = op3(&b, 0, 1).unwrap();
        assert_eq!(c.get(0, 1), -1);
        assert_eq!(op3(&c, 0, 1).unwrap(), b);
    }

    #[test]
    fn replay_reports_failing_step() {
        let a = a6();
        assert_eq!(replay(&a, &[]).unwrap(), a);
        let err = replay(
            &a,
            &[OpStep::FlipChildren(2), OpStep::FlipRootEdge { child: 3, root: 5 }],
        )
        .unwrap_err();
        assert_eq!(err.index, 1);
    }

    #[test]
    fn two_by_two_classes() {
        let p = bfs_closure_classes(2);
        assert_eq!(p.len(), 2);
        assert_eq!(p.classes, vec![vec![0], vec![1, 2]]);
        assert_eq!(bfs_closure_classes(1).len(), 1);
    }

    #[test]
    fn self_witness_is_empty() {
        let a = a6();
        let w = find_witness(&a, &a).unwrap().unwrap();
        assert!(w.steps.is_empty());
        assert_eq!(w.source_sha, w.target_sha);
    }

    #[test]
    fn witness_dimension_mismatch() {
        assert_eq!(
            find_witness(&FanoBottMatrix::zero(2), &FanoBottMatrix::zero(3)).unwrap_err(),
            OpError::DimensionMismatch(2, 3)
        );
    }

    #[test]
    fn simplify_cancels_pairs() {
        let p = Permutation::transposition(3, 0, 1);
        let steps = vec![
            OpStep::FlipChildren(1),
            OpStep::Permute(p.clone()),
            OpStep::Permute(p.inverse()),
            OpStep::FlipChildren(1),
            OpStep::FlipRootEdge { child: 0, root: 2 },
        ];
        assert_eq!(simplify(steps), vec![OpStep::FlipRootEdge { child: 0, root: 2 }]);
    }
}
