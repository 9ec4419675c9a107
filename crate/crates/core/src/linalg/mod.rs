//! Dense complex linear algebra used throughout the crate.

mod eigen;
mod matrix;
mod norm;
mod tensor;

pub use eigen::{eigvalsh, hermitian_eigenvalues, HermitianSpectrum};
pub use matrix::{ComplexMatrix, HERMITIAN_TOL};
pub use norm::{pnorm_of_values, schatten_p_norm, singular_values};
pub use tensor::{embed_with_identity, partial_trace, permute_sites, tensor_product, tensor_vec, transpose_sites};
