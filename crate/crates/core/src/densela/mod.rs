//! Dense complex linear algebra: SVD, eigenpairs, norms, projections,
//! kernels and realification.

mod eigen;
mod matrix;
mod realify;
mod subspace;
mod svd;

pub use eigen::{eigenpairs, EigenPair, EigenResult};
pub use matrix::{
    inner, norm2, real_dot, real_norm2, real_vector, ComplexDenseMatrix, ComplexVector, RealMatrix,
};
pub use realify::{complexify_vector, realify_matrix, realify_subspace, realify_vector};
pub use subspace::{
    default_rank_tol, dist_to_colspan, kernel_basis, orthonormalize, project, project_real,
    real_orthonormality_defect,
};
pub use svd::{min_gain, operator_norm, s_min, svd, SvdResult};
