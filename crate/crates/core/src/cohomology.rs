//! Degree-two invariants of the cohomology ring
//! `Z[x_1..x_d] / (x_j^2 - (sum_i n_ij x_i) x_j)`.
//!
//! Squares are reduced into the monomial basis `{x_i x_j : i < j}`, where
//! `(sum a_i x_i)^2` has coefficient `a_j (a_j n_ij + 2 a_i)` on `x_i x_j`.

use num_integer::Integer;
use thiserror::Error;

use crate::forest::SignedRootedForest;
use crate::linalg::Gf2Matrix;
use crate::matrix::FanoBottMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("column {} is not zero, so x_{} does not square to zero", .0 + 1, .0 + 1)]
    NotALeafColumn(usize),
    #[error("linear form has {got} coefficients, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
}

/// An integral degree-one class `sum a_i x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm(pub Vec<i64>);

impl LinearForm {
    pub fn unit(dim: usize, p: usize) -> Self {
        let mut a = vec![0; dim];
        a[p] = 1;
        LinearForm(a)
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// gcd of the coefficients is 1.
    pub fn is_primitive(&self) -> bool {
        self.0.iter().fold(0i64, |g, &a| g.gcd(&a)) == 1
    }

    /// Same form up to sign, with the first nonzero coefficient positive.
    pub fn normalized(&self) -> LinearForm {
        match self.0.iter().find(|&&a| a != 0) {
            Some(&a) if a < 0 => LinearForm(self.0.iter().map(|&v| -v).collect()),
            _ => self.clone(),
        }
    }
}

/// Coordinates `c(i, j)`, `i < j`, of a degree-four class in the square-free
/// monomial basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadCoefficients {
    dim: usize,
    coeffs: Vec<i64>,
}

impl QuadCoefficients {
    fn index(&self, i: usize, j: usize) -> usize {
        assert!(i < j && j < self.dim, "need i < j < dim");
        // pairs (0,1), (0,2), ..., (0,d-1), (1,2), ...
        i * (2 * self.dim - i - 1) / 2 + (j - i - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.coeffs[self.index(i, j)]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// `((i, j), c(i, j))` for every pair in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), i64)> + '_ {
        (0..self.dim)
            .flat_map(move |i| (i + 1..self.dim).map(move |j| (i, j)))
            .zip(self.coeffs.iter().copied())
    }
}

/// The square of `a`, reduced into the monomial basis.
pub fn square_reduce(
    a: &FanoBottMatrix,
    form: &LinearForm,
) -> Result<QuadCoefficients, CohomologyError> {
    let d = a.dim();
    let x = form.coefficients();
    if x.len() != d {
        return Err(CohomologyError::LengthMismatch {
            got: x.len(),
            expected: d,
        });
    }
    let mut coeffs = Vec::with_capacity(d * d.saturating_sub(1) / 2);
    for i in 0..d {
        for j in i + 1..d {
            coeffs.push(x[j] * (x[j] * a.get(i, j) + 2 * x[i]));
        }
    }
    Ok(QuadCoefficients { dim: d, coeffs })
}

/// Is `form` a square-vanishing element: nonzero, primitive, and squaring
/// to zero coefficient by coefficient.
pub fn is_sve(a: &FanoBottMatrix, form: &LinearForm) -> bool {
    !form.is_zero()
        && form.is_primitive()
        && square_reduce(a, form).is_ok_and(|q| q.is_zero())
}

/// A two-term square-vanishing element `x_p - 2 n_pq x_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartneredForm {
    pub p: usize,
    pub q: usize,
    /// `n_pq`, either `1` or `-1`.
    pub sign: i64,
}

impl PartneredForm {
    pub fn to_linear_form(self, dim: usize) -> LinearForm {
        let mut a = vec![0; dim];
        a[self.p] = 1;
        a[self.q] = -2 * self.sign;
        LinearForm(a)
    }
}

/// All square-vanishing elements, sorted into the three families:
/// `g` are the `x_p` that have a partner form, `g_prime` those partner
/// forms, `h` the remaining `x_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SveInventory {
    pub dim: usize,
    pub g: Vec<usize>,
    pub g_prime: Vec<PartneredForm>,
    pub h: Vec<usize>,
    pub maximal_basis_number: usize,
}

impl SveInventory {
    /// Every s.v.e., normalized and sorted.
    pub fn elements(&self) -> Vec<LinearForm> {
        let mut out: Vec<LinearForm> = self
            .g
            .iter()
            .chain(&self.h)
            .map(|&p| LinearForm::unit(self.dim, p))
            .chain(self.g_prime.iter().map(|f| f.to_linear_form(self.dim)))
            .collect();
        out.sort();
        out
    }
}

/// The classification of square-vanishing elements. A single `x_p` squares
/// to zero iff column `p` is zero; `x_p - 2 n_pq x_q` does iff `n_pq != 0`,
/// column `q` is zero apart from row `p`, and column `p` is zero.
pub fn enumerate_sve(a: &FanoBottMatrix) -> SveInventory {
    let d = a.dim();
    let mut g = Vec::new();
    let mut h = Vec::new();
    let mut g_prime = Vec::new();
    for p in (0..d).filter(|&p| a.column_is_zero(p)) {
        let partner = (p + 1..d).find(|&q| {
            a.get(p, q) != 0 && (0..q).all(|i| i == p || a.get(i, q) == 0)
        });
        match partner {
            Some(q) => {
                g.push(p);
                g_prime.push(PartneredForm {
                    p,
                    q,
                    sign: a.get(p, q),
                });
            }
            None => h.push(p),
        }
    }
    let maximal_basis_number = g.len() + h.len();
    SveInventory {
        dim: d,
        g,
        g_prime,
        h,
        maximal_basis_number,
    }
}

/// Quotient of the ring by `x_alpha` for a leaf `alpha`: delete row and
/// column `alpha`.
pub fn quotient_by_leaf(a: &FanoBottMatrix, alpha: usize) -> Result<FanoBottMatrix, CohomologyError> {
    if alpha >= a.dim() || !a.column_is_zero(alpha) {
        return Err(CohomologyError::NotALeafColumn(alpha));
    }
    Ok(a.delete_zero_column(alpha))
}

/// Leaf counts seen while repeatedly cutting every current leaf until the
/// forest is empty.
pub fn peel_signature(a: &FanoBottMatrix) -> Vec<usize> {
    let mut forest = SignedRootedForest::from_matrix(a);
    let mut out = Vec::new();
    while forest.size() > 0 {
        let leaves = forest.leaves();
        out.push(leaves.len());
        for &v in leaves.iter().rev() {
            forest = forest.leaf_cut(v).expect("leaf set computed above");
        }
    }
    out
}

/// Rank over GF(2) of the submatrix with rows `s` and columns outside `s`,
/// entries read mod 2.
pub fn cut_rank_gf2(a: &FanoBottMatrix, s: &[usize]) -> usize {
    let d = a.dim();
    let mut inside = vec![false; d];
    for &i in s {
        inside[i] = true;
    }
    let outside: Vec<usize> = (0..d).filter(|&j| !inside[j]).collect();
    let mut g = Gf2Matrix::new(outside.len());
    for i in (0..d).filter(|&i| inside[i]) {
        g.push_row(outside.iter().map(|&j| a.get(i, j)));
    }
    g.rank()
}
