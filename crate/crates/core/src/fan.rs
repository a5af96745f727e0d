//! Ray matrices of Bott fans and the row-matching diffeomorphism
//! certificate.
//!
//! The fan of a `d`-stage Bott manifold has rays `v_i^+` and `v_i^-`, and
//! its primitive collections are exactly the pairs `{v_i^+, v_i^-}`. With
//! `v_i^+ = e^i` the minus rays are the rows of `-E + A`.

use thiserror::Error;

use crate::forest::SignedRootedForest;
use crate::linalg::IntMatrix;
use crate::matrix::FanoBottMatrix;
use crate::ops::{self, OpSequence, OpStep, ReplayError};
use crate::perm::Permutation;
use crate::sign::Sign;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("primitive relation {} does not hold", .0 + 1)]
    RelationCheckFailed(usize),
    #[error("shapes differ: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("witness does not replay: {0}")]
    WitnessDoesNotReplay(ReplayError),
    #[error("witness does not reach the target matrix")]
    WitnessWrongTarget,
    #[error("after relabelling and flips the forests still differ at vertex {}", .0 + 1)]
    ForestsDisagree(usize),
    #[error("row {} of the transformed ray matrix does not match up to sign", .row + 1)]
    CertificateFailed { row: usize },
    #[error("unimodular transform for {step} did not reproduce the ray matrix of the new matrix")]
    TransformMismatch { step: String },
}

/// `2d x d` matrix whose first `d` rows are the plus rays and last `d` rows
/// the minus rays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayMatrix {
    dim: usize,
    rows: IntMatrix,
}

impl RayMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_int_matrix(&self) -> &IntMatrix {
        &self.rows
    }

    pub fn plus(&self, i: usize) -> &[i64] {
        self.rows.row(i)
    }

    pub fn minus(&self, i: usize) -> &[i64] {
        self.rows.row(self.dim + i)
    }

    pub fn top(&self) -> IntMatrix {
        self.rows.row_block(0, self.dim)
    }

    pub fn bottom(&self) -> IntMatrix {
        self.rows.row_block(self.dim, 2 * self.dim)
    }

    /// Every ray has coprime coordinates.
    pub fn rows_primitive(&self) -> bool {
        use num_integer::Integer;
        (0..2 * self.dim).all(|r| self.rows.row(r).iter().fold(0i64, |g, &v| g.gcd(&v)) == 1)
    }
}

/// The ray matrix of `a`, after checking `v_i^+ + v_i^- = v_phi(i)^sigma(i)`
/// (zero at roots) for every `i`.
pub fn rays(a: &FanoBottMatrix) -> Result<RayMatrix, FanError> {
    let d = a.dim();
    let mut minus = a.as_int_matrix().clone();
    for i in 0..d {
        minus.set(i, i, -1);
    }
    let rows = IntMatrix::vstack(&IntMatrix::identity(d), &minus).expect("both halves are d wide");
    let m = RayMatrix { dim: d, rows };
    let ps = a.to_phi_sigma();
    for i in 0..d {
        let sum: Vec<i64> = m.plus(i).iter().zip(m.minus(i)).map(|(x, y)| x + y).collect();
        let ok = match ps.parent(i) {
            None => sum.iter().all(|&v| v == 0),
            Some((j, Sign::Plus)) => sum == m.plus(j),
            Some((j, Sign::Minus)) => sum == m.minus(j),
        };
        if !ok {
            return Err(FanError::RelationCheckFailed(i));
        }
    }
    Ok(m)
}

/// Degree `2 - (sum of right-hand coefficients)` of each primitive relation:
/// `2` when `v_i^+ + v_i^- = 0`, `1` when it equals a single ray.
pub fn primitive_relation_degrees(a: &FanoBottMatrix) -> Result<Vec<i64>, FanError> {
    let m = rays(a)?;
    Ok((0..a.dim())
        .map(|i| {
            let rhs_is_zero = m.plus(i).iter().zip(m.minus(i)).all(|(x, y)| x + y == 0);
            if rhs_is_zero {
                2
            } else {
                1
            }
        })
        .collect())
}

/// Signs relating the rays of two matrices, keyed by ray label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignReport {
    /// `plus[i]`: `v_i^+ = s * w_i^+`, or `None` if no sign works.
    pub plus: Vec<Option<Sign>>,
    pub minus: Vec<Option<Sign>>,
}

impl SignReport {
    pub fn matches(&self) -> bool {
        self.plus.iter().chain(&self.minus).all(Option::is_some)
    }

    /// First mismatching row in ray-matrix order.
    pub fn first_mismatch(&self) -> Option<usize> {
        self.plus.iter().chain(&self.minus).position(Option::is_none)
    }

    /// One sign per label when both rays of every pair match with the same
    /// sign.
    pub fn label_signs(&self) -> Option<Vec<Sign>> {
        self.plus
            .iter()
            .zip(&self.minus)
            .map(|(p, m)| match (p, m) {
                (Some(p), Some(m)) if p == m => Some(*p),
                _ => None,
            })
            .collect()
    }

    /// Signs of all `2d` rows, plus rays first.
    pub fn row_signs(&self) -> Vec<Option<Sign>> {
        self.plus.iter().chain(&self.minus).copied().collect()
    }
}

fn row_sign(a: &[i64], b: &[i64]) -> Option<Sign> {
    if a == b {
        Some(Sign::Plus)
    } else if a.iter().zip(b).all(|(x, y)| *x == -*y) {
        Some(Sign::Minus)
    } else {
        None
    }
}

/// Compares ray `r` of `m` with ray `r` of `other` up to sign. Rows are
/// paired by position, so each primitive collection `{v_i^+, v_i^-}` is
/// compared with `{w_i^+, w_i^-}` and the simplicial complex is unchanged.
pub fn rows_match_up_to_sign(m: &IntMatrix, other: &IntMatrix) -> Result<SignReport, FanError> {
    if m.rows() != other.rows() || m.cols() != other.cols() || m.rows() != 2 * m.cols() {
        return Err(FanError::ShapeMismatch(
            m.rows(),
            m.cols(),
            other.rows(),
            other.cols(),
        ));
    }
    let d = m.cols();
    let signs = |offset: usize| -> Vec<Option<Sign>> {
        (0..d)
            .map(|i| row_sign(m.row(offset + i), other.row(offset + i)))
            .collect()
    };
    Ok(SignReport {
        plus: signs(0),
        minus: signs(d),
    })
}

/// `op1` on a ray matrix: permute rows inside each half and permute columns.
pub fn permute_rays(m: &IntMatrix, perm: &Permutation) -> IntMatrix {
    let d = m.cols();
    let mut out = IntMatrix::zeros(m.rows(), d);
    for half in 0..m.rows() / d {
        for i in 0..d {
            for j in 0..d {
                out.set(half * d + perm.apply(i), perm.apply(j), m.get(half * d + i, j));
            }
        }
    }
    out
}

/// The unimodular matrix realising `op2` at `k` on the right: the identity
/// with row `k` replaced by `-e^k + A^k`.
pub fn flip_transform(a: &FanoBottMatrix, k: usize) -> IntMatrix {
    let d = a.dim();
    let mut t = IntMatrix::identity(d);
    for j in 0..d {
        t.set(k, j, a.get(k, j));
    }
    t.set(k, k, -1);
    t
}

/// One unimodular step recorded while building `M''`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformRecord {
    pub step: OpStep,
    /// `T_k` for an `op2` step; `None` for a relabelling.
    pub matrix: Option<IntMatrix>,
}

/// Everything needed to re-check a diffeomorphism certificate by hand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub witness: OpSequence,
    pub m: IntMatrix,
    pub transforms: Vec<TransformRecord>,
    pub m_double_prime: IntMatrix,
    pub m_prime: IntMatrix,
    /// Diagonals of the sign-flip matrices `I_j`, one per root child whose
    /// edge sign still differs.
    pub diagonals: Vec<Vec<i64>>,
    pub signs: SignReport,
}

/// Verifies that `a` and `b` are diffeomorphic via the witness `w`.
///
/// The relabelling and `op2` steps of `w` are realised as unimodular
/// transformations of the ray matrix `M` of `a`, giving `M''`. Any root
/// edge whose sign still disagrees with `b` is handled by negating the
/// coordinates of the subtree hanging from it, and the rows of the result
/// must then equal the rays of `b` up to sign.
pub fn certify_diffeo(
    a: &FanoBottMatrix,
    b: &FanoBottMatrix,
    w: &OpSequence,
) -> Result<Certificate, FanError> {
    if a.dim() != b.dim() {
        return Err(FanError::ShapeMismatch(2 * a.dim(), a.dim(), 2 * b.dim(), b.dim()));
    }
    let reached = ops::replay(a, &w.steps).map_err(FanError::WitnessDoesNotReplay)?;
    if reached != *b {
        return Err(FanError::WitnessWrongTarget);
    }
    let d = a.dim();
    let m = rays(a)?.as_int_matrix().clone();
    let mut cur_a = a.clone();
    let mut cur_m = m.clone();
    let mut transforms = Vec::new();
    for step in &w.steps {
        let matrix = match step {
            OpStep::Permute(p) => {
                cur_m = permute_rays(&cur_m, p);
                None
            }
            OpStep::FlipChildren(k) => {
                let t = flip_transform(&cur_a, *k);
                cur_m = &cur_m * &t;
                // M T_k carries v_k^- in the top half and v_k^+ in the
                // bottom half; swap them back within their collection.
                cur_m.swap_rows(*k, d + *k);
                Some(t)
            }
            OpStep::FlipRootEdge { .. } => continue,
        };
        cur_a = ops::apply_step(&cur_a, step).map_err(|_| FanError::TransformMismatch {
            step: step.to_string(),
        })?;
        if cur_m != *rays(&cur_a)?.as_int_matrix() {
            return Err(FanError::TransformMismatch {
                step: step.to_string(),
            });
        }
        transforms.push(TransformRecord {
            step: step.clone(),
            matrix,
        });
    }

    let t2 = SignedRootedForest::from_matrix(&cur_a);
    let t_target = SignedRootedForest::from_matrix(b);
    let mut diagonals = Vec::new();
    for v in 0..d {
        let (e2, e_t) = (t2.edge(v), t_target.edge(v));
        match (e2, e_t) {
            (None, None) => {}
            (Some(x), Some(y)) if x.parent == y.parent => {
                if x.sign != y.sign {
                    if !t2.is_root(x.parent) {
                        return Err(FanError::ForestsDisagree(v));
                    }
                    let mut diag = vec![1; d];
                    for u in t2.subtree(v) {
                        diag[u] = -1;
                    }
                    diagonals.push(diag);
                }
            }
            _ => return Err(FanError::ForestsDisagree(v)),
        }
    }

    let mut flipped = cur_m.clone();
    for diag in &diagonals {
        flipped = &flipped * &IntMatrix::diagonal(diag);
    }
    let m_prime = rays(b)?.as_int_matrix().clone();
    let signs = rows_match_up_to_sign(&flipped, &m_prime)?;
    if let Some(row) = signs.first_mismatch() {
        return Err(FanError::CertificateFailed { row });
    }
    Ok(Certificate {
        witness: w.clone(),
        m,
        transforms,
        m_double_prime: cur_m,
        m_prime,
        diagonals,
        signs,
    })
}
