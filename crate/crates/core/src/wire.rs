//! JSON wire formats. Every index on the wire is 1-based.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohomology::{PartneredForm, SveInventory};
use crate::fan::Certificate;
use crate::forest::{ForestError, SignedRootedForest};
use crate::linalg::IntMatrix;
use crate::matrix::{FanoBottMatrix, MatrixError};
use crate::ops::{OpSequence, OpStep};
use crate::perm::{Permutation, PermutationError};
use crate::sign::Sign;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Permutation(#[from] PermutationError),
    #[error("{0}")]
    Malformed(String),
}

/// `{"dim": d, "entries": [[row 1], ..., [row d]]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<Vec<i64>>,
}

impl From<&FanoBottMatrix> for MatrixJson {
    fn from(a: &FanoBottMatrix) -> Self {
        MatrixJson {
            dim: a.dim(),
            entries: a.to_rows(),
        }
    }
}

impl MatrixJson {
    /// The raw grid, before any row-condition checks.
    pub fn to_grid(&self) -> Result<IntMatrix, WireError> {
        if self.entries.len() != self.dim || self.entries.iter().any(|r| r.len() != self.dim) {
            return Err(WireError::Malformed(format!(
                "\"entries\" must be a {0}x{0} grid",
                self.dim
            )));
        }
        IntMatrix::from_rows(&self.entries).map_err(|e| WireError::Malformed(e.to_string()))
    }

    pub fn to_matrix(&self) -> Result<FanoBottMatrix, WireError> {
        Ok(FanoBottMatrix::validate(&self.to_grid()?)?)
    }
}

/// `{"row": p, "violation": "..."}`; `row` is null for shape errors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionJson {
    pub row: Option<usize>,
    pub violation: String,
}

impl From<&MatrixError> for RejectionJson {
    fn from(e: &MatrixError) -> Self {
        RejectionJson {
            row: e.row().map(|r| r + 1),
            violation: e.to_string(),
        }
    }
}

/// `{"size": d, "parents": [...], "signs": [...]}` with parent `0` and sign
/// `""` at roots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestJson {
    pub size: usize,
    pub parents: Vec<usize>,
    pub signs: Vec<String>,
}

impl From<&SignedRootedForest> for ForestJson {
    fn from(t: &SignedRootedForest) -> Self {
        let d = t.size();
        ForestJson {
            size: d,
            parents: (0..d).map(|v| t.parent(v).map_or(0, |p| p + 1)).collect(),
            signs: (0..d)
                .map(|v| t.sign(v).map_or(String::new(), |s| s.symbol().to_owned()))
                .collect(),
        }
    }
}

impl ForestJson {
    pub fn to_forest(&self) -> Result<SignedRootedForest, WireError> {
        if self.parents.len() != self.size || self.signs.len() != self.size {
            return Err(WireError::Malformed(format!(
                "\"parents\" and \"signs\" must have {} entries",
                self.size
            )));
        }
        let mut edges = Vec::with_capacity(self.size);
        for (v, (&p, s)) in self.parents.iter().zip(&self.signs).enumerate() {
            let edge = match (p, s.as_str()) {
                (0, "") => None,
                (0, _) => {
                    return Err(WireError::Malformed(format!(
                        "root {} must have an empty sign",
                        v + 1
                    )))
                }
                (p, s) => {
                    let sign = Sign::parse(s).ok_or_else(|| {
                        WireError::Malformed(format!("vertex {} has sign {s:?}", v + 1))
                    })?;
                    Some((p - 1, sign))
                }
            };
            edges.push(edge);
        }
        Ok(SignedRootedForest::new(edges)?)
    }
}

/// Either input format, for commands that only need a forest.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixOrForest {
    Matrix(MatrixJson),
    Forest(ForestJson),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op")]
pub enum StepJson {
    #[serde(rename = "p")]
    Permute { perm: Vec<usize> },
    #[serde(rename = "2")]
    FlipChildren { k: usize },
    #[serde(rename = "3")]
    FlipRootEdge { k: usize, l: usize },
}

impl From<&OpStep> for StepJson {
    fn from(s: &OpStep) -> Self {
        match s {
            OpStep::Permute(p) => StepJson::Permute {
                perm: p.images().iter().map(|i| i + 1).collect(),
            },
            OpStep::FlipChildren(k) => StepJson::FlipChildren { k: k + 1 },
            OpStep::FlipRootEdge { child, root } => StepJson::FlipRootEdge {
                k: child + 1,
                l: root + 1,
            },
        }
    }
}

fn zero_based(i: usize, what: &str) -> Result<usize, WireError> {
    i.checked_sub(1)
        .ok_or_else(|| WireError::Malformed(format!("{what} must be at least 1")))
}

impl StepJson {
    pub fn to_step(&self) -> Result<OpStep, WireError> {
        Ok(match self {
            StepJson::Permute { perm } => {
                let images = perm
                    .iter()
                    .map(|&i| zero_based(i, "perm entries"))
                    .collect::<Result<_, _>>()?;
                OpStep::Permute(Permutation::from_images(images)?)
            }
            StepJson::FlipChildren { k } => OpStep::FlipChildren(zero_based(*k, "k")?),
            StepJson::FlipRootEdge { k, l } => OpStep::FlipRootEdge {
                child: zero_based(*k, "k")?,
                root: zero_based(*l, "l")?,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub steps: Vec<StepJson>,
    pub source_sha: String,
    pub target_sha: String,
}

impl From<&OpSequence> for WitnessJson {
    fn from(w: &OpSequence) -> Self {
        WitnessJson {
            steps: w.steps.iter().map(StepJson::from).collect(),
            source_sha: w.source_sha.clone(),
            target_sha: w.target_sha.clone(),
        }
    }
}

impl WitnessJson {
    pub fn to_sequence(&self) -> Result<OpSequence, WireError> {
        Ok(OpSequence {
            steps: self
                .steps
                .iter()
                .map(StepJson::to_step)
                .collect::<Result<_, _>>()?,
            source_sha: self.source_sha.clone(),
            target_sha: self.target_sha.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartneredFormJson {
    pub p: usize,
    pub q: usize,
    pub sign: i64,
}

impl From<&PartneredForm> for PartneredFormJson {
    fn from(f: &PartneredForm) -> Self {
        PartneredFormJson {
            p: f.p + 1,
            q: f.q + 1,
            sign: f.sign,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SveJson {
    pub h: Vec<usize>,
    pub g: Vec<usize>,
    pub g_prime: Vec<PartneredFormJson>,
    pub maximal_basis_number: usize,
}

impl From<&SveInventory> for SveJson {
    fn from(inv: &SveInventory) -> Self {
        SveJson {
            h: inv.h.iter().map(|p| p + 1).collect(),
            g: inv.g.iter().map(|p| p + 1).collect(),
            g_prime: inv.g_prime.iter().map(PartneredFormJson::from).collect(),
            maximal_basis_number: inv.maximal_basis_number,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub witness: WitnessJson,
    pub m: Vec<Vec<i64>>,
    pub m_double_prime: Vec<Vec<i64>>,
    pub m_prime: Vec<Vec<i64>>,
    pub diagonals: Vec<Vec<i64>>,
    /// Sign of each of the `2d` rows, plus rays first.
    pub signs: Vec<String>,
}

impl From<&Certificate> for CertificateJson {
    fn from(c: &Certificate) -> Self {
        CertificateJson {
            witness: WitnessJson::from(&c.witness),
            m: c.m.to_rows(),
            m_double_prime: c.m_double_prime.to_rows(),
            m_prime: c.m_prime.to_rows(),
            diagonals: c.diagonals.clone(),
            signs: c
                .signs
                .row_signs()
                .into_iter()
                .map(|s| s.map_or("?", Sign::symbol).to_owned())
                .collect(),
        }
    }
}
