//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Qubit 0 is the most significant bit of an amplitude index: the basis
//! state `|q0 q1 … q(k-1)⟩` sits at index `q0·2^(k-1) + … + q(k-1)`.
//! Every module in the crate shares this convention.

mod basis;
mod density;
mod measure;
pub mod random;
mod state;

pub use basis::{
    change_of_basis_unitary, gram_schmidt, hermitian_family, permutation_unitary,
    verify_orthogonal_family, BasisDocument, BasisSet, Permutation, UnitaryFamily,
};
pub use density::{
    concurrence, holevo_bound, reduced_density, trace_distance, von_neumann_entropy,
    DensityMatrix,
};
pub use measure::{factorize, measure, measure_subset, Factor, SubsetMeasurement};
pub use state::StateVec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Absolute tolerance for orthonormality, unitarity and density-matrix checks.
pub const TOL: f64 = 1e-10;

/// Residual norm below which Gram-Schmidt declares linear dependence.
pub const DEPENDENCE_TOL: f64 = 1e-8;

/// Largest supported code-basis dimension (M = 2^8).
pub const MAX_BASIS_DIM: usize = 1 << 8;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn log2_exact(len: usize) -> crate::Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(crate::Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros() as usize)
}

/// Largest absolute entry of `U†U − I`.
pub fn unitarity_deviation(op: &CMatrix) -> f64 {
    if !op.is_square() {
        return f64::INFINITY;
    }
    let product = op.adjoint() * op;
    let identity = CMatrix::identity(op.nrows(), op.ncols());
    max_abs(&(product - identity))
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Kronecker product, left factor on the more significant qubits.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// The single-qubit Pauli matrices, in the order X, Y, Z.
pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// Rotation `exp(-iθY/2)`; maps `|0⟩` to `cos(θ/2)|0⟩ + sin(θ/2)|1⟩`.
pub fn rotation_y(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
}
