//! Numerical construction and verification of matrix tuples in prescribed
//! conjugacy classes with `ΣA_j = 0` or `ΠM_j = I`.

pub mod error;
pub mod linalg;
pub mod objective;
pub mod realizer;
pub mod tuple;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{jordan_matrix, CMat};
pub use realizer::{build_tuple, deform, diagonal_limit_check, Deformation, DiagonalLimitReport, LimitEntry, Witness};
pub use tuple::MatrixTuple;
pub use verify::{
    algebra_dimension, centralizer_dimension, identify_jnf, numeric_rank, residual, verify, SpectralGaps,
    VerificationReport, VerifyOptions, DEFAULT_RANK_TOLERANCE,
};
