//! Truncated single-mode operators in the number basis `|0⟩ … |dim−1⟩`.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Annihilation operator `a`, with `a|n⟩ = √n |n−1⟩`.
pub fn annihilation(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |i, j| if j == i + 1 { Complex64::new((j as f64).sqrt(), 0.0) } else { Complex64::new(0.0, 0.0) })
}

pub fn creation(dim: usize) -> DMatrix<Complex64> {
    annihilation(dim).adjoint()
}

/// `e^{c·op}` by the matrix exponential.
pub fn exp_scaled(op: &DMatrix<Complex64>, c: Complex64) -> DMatrix<Complex64> {
    (op * c).exp()
}

/// `D(β) = exp(βa† − β̄a)` on the truncated space.
pub fn displacement(dim: usize, beta: Complex64) -> DMatrix<Complex64> {
    (creation(dim) * beta - annihilation(dim) * beta.conj()).exp()
}
