//! The matrices `FB(d)`: strictly upper triangular `{-1, 0, 1}` matrices whose
//! rows are each zero, a unit row `e^q`, or `-e^q + (row q)`.
//!
//! All indices in this API are 0-based. Wire formats and `Display` output are
//! 1-based (see [`crate::wire`]).

use std::fmt;

use thiserror::Error;

use crate::linalg::{IntMatrix, ShapeError};
use crate::sign::Sign;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("entry ({}, {}) below or on the diagonal is nonzero", .row + 1, .col + 1)]
    NotUpperTriangular { row: usize, col: usize },
    #[error("entry ({}, {}) = {value} is outside {{-1, 0, 1}}", .row + 1, .col + 1)]
    EntryOutOfRange { row: usize, col: usize, value: i64 },
    #[error("row {} fails every row condition: {reason}", .row + 1)]
    RowConditionViolated { row: usize, reason: RowViolation },
    #[error("phi({}) = {} is invalid", .index + 1, .value + 1)]
    InvalidPhi { index: usize, value: usize },
    #[error("sign at index {} must be present exactly when phi points at a vertex", .index + 1)]
    InvalidSigma { index: usize },
}

impl MatrixError {
    /// The offending row (0-based), when the error is tied to one.
    pub fn row(&self) -> Option<usize> {
        match *self {
            MatrixError::NotUpperTriangular { row, .. }
            | MatrixError::EntryOutOfRange { row, .. }
            | MatrixError::RowConditionViolated { row, .. } => Some(row),
            MatrixError::InvalidPhi { index, .. } | MatrixError::InvalidSigma { index } => {
                Some(index)
            }
            _ => None,
        }
    }
}

/// Why a nonzero row matched neither a unit row nor a negated copy.
///
/// A nonzero row is never the zero row. A `+1` leading entry rules out the
/// negated copy shape and a `-1` leading entry rules out the unit shape, so
/// only the remaining shape needs a witness column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowViolation {
    /// Leading entry `+1` at `leading`, but `stray` is also nonzero.
    PlusNotUnit { leading: usize, stray: usize },
    /// Leading entry `-1` at `leading`, but the row differs from row
    /// `leading` at `column`.
    MinusCopyMismatch { leading: usize, column: usize },
}

impl fmt::Display for RowViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RowViolation::PlusNotUnit { leading, stray } => write!(
                f,
                "zero: row is nonzero; unit: leading +1 in column {} but column {} is also nonzero; \
                 negated copy: leading entry is +1, not -1",
                leading + 1,
                stray + 1
            ),
            RowViolation::MinusCopyMismatch { leading, column } => write!(
                f,
                "zero: row is nonzero; unit: leading entry is -1, not +1; \
                 negated copy: leading -1 in column {} but column {} differs from row {}",
                leading + 1,
                column + 1,
                leading + 1
            ),
        }
    }
}

/// The shape of one row of a Fano Bott matrix.
///
/// `Plus(q)` is the unit row `e^q`; `MinusCopy(q)` is `-e^q + (row q)`. In
/// both cases `q` is the column of the left-most nonzero entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowStructure {
    Zero,
    Plus(usize),
    MinusCopy(usize),
}

impl RowStructure {
    /// Column of the leading entry and its sign, or `None` for a zero row.
    pub fn leading(self) -> Option<(usize, Sign)> {
        match self {
            RowStructure::Zero => None,
            RowStructure::Plus(q) => Some((q, Sign::Plus)),
            RowStructure::MinusCopy(q) => Some((q, Sign::Minus)),
        }
    }
}

/// A validated element of `FB(d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FanoBottMatrix {
    inner: IntMatrix,
}

impl FanoBottMatrix {
    /// Checks a square grid against the Fano row conditions.
    ///
    /// Rows are scanned top to bottom and the first offending row is
    /// reported.
    pub fn validate(grid: &IntMatrix) -> Result<Self, MatrixError> {
        if !grid.is_square() {
            return Err(MatrixError::NotSquare {
                rows: grid.rows(),
                cols: grid.cols(),
            });
        }
        let d = grid.rows();
        for p in 0..d {
            for j in 0..d {
                let v = grid.get(p, j);
                if j <= p && v != 0 {
                    return Err(MatrixError::NotUpperTriangular { row: p, col: j });
                }
                if !(-1..=1).contains(&v) {
                    return Err(MatrixError::EntryOutOfRange {
                        row: p,
                        col: j,
                        value: v,
                    });
                }
            }
            classify_row(grid, p).map_err(|reason| MatrixError::RowConditionViolated {
                row: p,
                reason,
            })?;
        }
        Ok(Self {
            inner: grid.clone(),
        })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, MatrixError> {
        Self::validate(&IntMatrix::from_rows(rows)?)
    }

    /// Wraps a grid that is valid by construction.
    pub(crate) fn from_trusted(inner: IntMatrix) -> Self {
        debug_assert!(
            Self::validate(&inner).is_ok(),
            "constructed an invalid matrix:\n{inner}"
        );
        Self { inner }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            inner: IntMatrix::zeros(dim, dim),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.inner.get(i, j)
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[i64] {
        self.inner.row(i)
    }

    pub fn as_int_matrix(&self) -> &IntMatrix {
        &self.inner
    }

    pub fn into_int_matrix(self) -> IntMatrix {
        self.inner
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.inner.to_rows()
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        self.row(i).iter().all(|&v| v == 0)
    }

    pub fn column_is_zero(&self, j: usize) -> bool {
        (0..self.dim()).all(|i| self.get(i, j) == 0)
    }

    /// Classification of row `p`. Total on valid matrices.
    pub fn row_structure(&self, p: usize) -> RowStructure {
        classify_row(&self.inner, p).expect("validated matrix has a well-formed row")
    }

    /// The parent map and edge signs encoded by the leading entries.
    pub fn to_phi_sigma(&self) -> PhiSigma {
        let d = self.dim();
        let mut phi = Vec::with_capacity(d);
        let mut sigma = Vec::with_capacity(d);
        for p in 0..d {
            match self.row_structure(p).leading() {
                Some((q, s)) => {
                    phi.push(q);
                    sigma.push(Some(s));
                }
                None => {
                    phi.push(d);
                    sigma.push(None);
                }
            }
        }
        PhiSigma { phi, sigma }
    }

    /// Rebuilds the matrix from its leading entries by following upward
    /// paths: `n_ij = 1` when the path from `i` to `j` is a run of minus
    /// edges closed by one plus edge, `-1` when it is all minus, else `0`.
    pub fn from_phi_sigma(ps: &PhiSigma) -> Self {
        let d = ps.dim();
        let mut m = IntMatrix::zeros(d, d);
        for i in 0..d {
            let mut from = i;
            while let Some((to, sign)) = ps.parent(from) {
                match sign {
                    Sign::Plus => {
                        m.set(i, to, 1);
                        break;
                    }
                    Sign::Minus => {
                        m.set(i, to, -1);
                        from = to;
                    }
                }
            }
        }
        Self::from_trusted(m)
    }

    /// Block-diagonal sum; `other`'s indices are shifted by `self.dim()`.
    pub fn direct_sum(&self, other: &FanoBottMatrix) -> FanoBottMatrix {
        let (a, b) = (self.dim(), other.dim());
        let mut m = IntMatrix::zeros(a + b, a + b);
        for i in 0..a {
            for j in 0..a {
                m.set(i, j, self.get(i, j));
            }
        }
        for i in 0..b {
            for j in 0..b {
                m.set(a + i, a + j, other.get(i, j));
            }
        }
        Self::from_trusted(m)
    }

    /// Deletes row and column `alpha`. The caller guarantees the column is
    /// zero, which keeps every remaining row well formed.
    pub(crate) fn delete_zero_column(&self, alpha: usize) -> FanoBottMatrix {
        debug_assert!(self.column_is_zero(alpha));
        let d = self.dim();
        let keep: Vec<usize> = (0..d).filter(|&i| i != alpha).collect();
        let mut m = IntMatrix::zeros(d - 1, d - 1);
        for (ni, &i) in keep.iter().enumerate() {
            for (nj, &j) in keep.iter().enumerate() {
                m.set(ni, nj, self.get(i, j));
            }
        }
        Self::from_trusted(m)
    }
}

impl fmt::Display for FanoBottMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.inner, f)
    }
}

/// Matches row `p` of `grid` against the three row templates. Assumes the
/// row is already known to be strictly upper triangular with entries in
/// `{-1, 0, 1}`.
fn classify_row(grid: &IntMatrix, p: usize) -> Result<RowStructure, RowViolation> {
    let d = grid.cols();
    let row = grid.row(p);
    let Some(q) = (p + 1..d).find(|&j| row[j] != 0) else {
        return Ok(RowStructure::Zero);
    };
    if row[q] > 0 {
        match (q + 1..d).find(|&j| row[j] != 0) {
            None => Ok(RowStructure::Plus(q)),
            Some(stray) => Err(RowViolation::PlusNotUnit { leading: q, stray }),
        }
    } else {
        let target = grid.row(q);
        match (q + 1..d).find(|&j| row[j] != target[j]) {
            None => Ok(RowStructure::MinusCopy(q)),
            Some(column) => Err(RowViolation::MinusCopyMismatch { leading: q, column }),
        }
    }
}

/// The pair `(phi, sigma)`: `phi[i]` is the parent of `i`, with the sentinel
/// `dim` marking a root, and `sigma[i]` is the sign of that edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhiSigma {
    phi: Vec<usize>,
    sigma: Vec<Option<Sign>>,
}

impl PhiSigma {
    /// Requires `i < phi[i] <= dim` and `sigma[i]` present exactly when
    /// `phi[i] < dim`. Acyclicity follows from the strict increase.
    pub fn new(phi: Vec<usize>, sigma: Vec<Option<Sign>>) -> Result<Self, MatrixError> {
        let d = phi.len();
        if sigma.len() != d {
            return Err(MatrixError::InvalidSigma {
                index: sigma.len().min(d),
            });
        }
        for (i, (&p, s)) in phi.iter().zip(&sigma).enumerate() {
            if p <= i || p > d {
                return Err(MatrixError::InvalidPhi { index: i, value: p });
            }
            if (p < d) != s.is_some() {
                return Err(MatrixError::InvalidSigma { index: i });
            }
        }
        Ok(Self { phi, sigma })
    }

    pub fn dim(&self) -> usize {
        self.phi.len()
    }

    pub fn phi(&self) -> &[usize] {
        &self.phi
    }

    pub fn sigma(&self) -> &[Option<Sign>] {
        &self.sigma
    }

    /// Parent and edge sign of `i`, `None` at a root.
    pub fn parent(&self, i: usize) -> Option<(usize, Sign)> {
        self.sigma[i].map(|s| (self.phi[i], s))
    }
}

/// `|FB(d)| = (2d - 1)!!`.
pub fn fb_count(d: usize) -> u128 {
    (1..=d as u128).map(|p| 2 * p - 1).product()
}

/// Every element of `FB(d)` exactly once.
///
/// Matrices are built from the bottom row up; the stream is ordered
/// lexicographically by the row choices read from row `d - 2` down to row
/// `0`, with `Zero < Plus(q) < MinusCopy(q)` and `q` ascending.
pub fn enumerate(d: usize) -> FbEnumerator {
    FbEnumerator {
        d,
        digits: vec![0; d],
        done: false,
    }
}

pub struct FbEnumerator {
    d: usize,
    digits: Vec<usize>,
    done: bool,
}

impl FbEnumerator {
    fn choices(&self, p: usize) -> usize {
        1 + 2 * (self.d - 1 - p)
    }

    fn structure(&self, p: usize) -> RowStructure {
        let spread = self.d - 1 - p;
        match self.digits[p] {
            0 => RowStructure::Zero,
            k if k <= spread => RowStructure::Plus(p + k),
            k => RowStructure::MinusCopy(p + k - spread),
        }
    }

    fn build(&self) -> FanoBottMatrix {
        let d = self.d;
        let mut m = IntMatrix::zeros(d, d);
        for p in (0..d).rev() {
            match self.structure(p) {
                RowStructure::Zero => {}
                RowStructure::Plus(q) => m.set(p, q, 1),
                RowStructure::MinusCopy(q) => {
                    for j in q + 1..d {
                        let v = m.get(q, j);
                        m.set(p, j, v);
                    }
                    m.set(p, q, -1);
                }
            }
        }
        FanoBottMatrix::from_trusted(m)
    }

    fn advance(&mut self) {
        for p in 0..self.d {
            self.digits[p] += 1;
            if self.digits[p] < self.choices(p) {
                return;
            }
            self.digits[p] = 0;
        }
        self.done = true;
    }

    fn remaining(&self) -> u128 {
        if self.done {
            return 0;
        }
        let mut rank = 0u128;
        for p in (0..self.d).rev() {
            rank = rank * self.choices(p) as u128 + self.digits[p] as u128;
        }
        fb_count(self.d) - rank
    }
}

impl Iterator for FbEnumerator {
    type Item = FanoBottMatrix;

    fn next(&mut self) -> Option<FanoBottMatrix> {
        if self.done {
            return None;
        }
        let m = self.build();
        self.advance();
        Some(m)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        match usize::try_from(self.remaining()) {
            Ok(n) => (n, Some(n)),
            Err(_) => (usize::MAX, None),
        }
    }
}
