//! Dense complex Hermitian linear algebra.

mod circulant;
mod eig;
mod matrix;
mod svd;

pub use circulant::{
    circulant_from_first_row, circulant_twirl, dft_eigenvalues, first_row_from_eigenvalues,
    fourier_matrix, root_of_unity, shift_deviation, shift_matrix, twirled_first_row,
};
pub use eig::{
    eig_hermitian, eig_hermitian_warm, eigenvalues, min_eigenvalue, project_psd, Spectrum,
};
pub use matrix::{hermitian_asymmetry, ComplexMatrix, HermitianMatrix, HERMITIAN_TOL};
pub use svd::{pseudoinverse, svd, Svd};
