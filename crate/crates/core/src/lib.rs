//! Fano Bott manifolds: upper triangular matrices, signed rooted forests,
//! the three matrix operations, degree-two cohomology invariants and ray
//! matrices of the underlying fans.

pub mod cohomology;
pub mod fan;
pub mod forest;
pub mod linalg;
pub mod matrix;
pub mod ops;
pub mod perm;
pub mod sign;
pub mod wire;

pub use cohomology::{
    cut_rank_gf2, enumerate_sve, is_sve, peel_signature, quotient_by_leaf, square_reduce,
    CohomologyError, LinearForm, PartneredForm, QuadCoefficients, SveInventory,
};
pub use fan::{
    certify_diffeo, primitive_relation_degrees, rays, rows_match_up_to_sign, Certificate,
    FanError, RayMatrix, SignReport,
};
pub use forest::{CanonicalCode, CodeMode, CodeNode, Edge, ForestError, SignedRootedForest};
pub use linalg::{Gf2Matrix, IntMatrix, ShapeError};
pub use matrix::{
    enumerate, fb_count, FanoBottMatrix, FbEnumerator, MatrixError, PhiSigma, RowStructure,
    RowViolation,
};
pub use ops::{
    bfs_closure_classes, closure_classes, digest, find_witness, find_witness_in, op1, op2, op3,
    replay, OpError, OpSequence, OpSet, OpStep, Partition, ReplayError,
};
pub use perm::{Permutation, PermutationError};
pub use sign::Sign;
