//! Dense complex matrix primitives.
//!
//! Conventions fixed for the whole crate:
//! * matrices are row-major, and `vec(a)[i * cols + j] = a[i, j]`;
//! * on `H_A (x) H_B` the basis vector `|i>|j>` has index `i * nb + j`.

mod decomp;
mod matrix;
mod state;

use num_complex::Complex;
use num_traits::Zero;

pub use decomp::{hermitian_eigen, hermitian_function, svd, HermitianEigen, Svd};
pub use matrix::ComplexMatrix;
pub use state::{validate_density, BipartiteState, Dims, Subsystem, Tolerances};

use crate::error::{mismatch, Result};
use crate::scalar::Real;

/// Kronecker product: `out[(i*b.rows + k), (j*b.cols + l)] = a[i,j] * b[k,l]`.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let rows = a.rows().checked_mul(b.rows()).ok_or_else(|| mismatch("kron", "representable size", "overflow"))?;
    let cols = a.cols().checked_mul(b.cols()).ok_or_else(|| mismatch("kron", "representable size", "overflow"))?;
    rows.checked_mul(cols).ok_or_else(|| mismatch("kron", "representable size", "overflow"))?;
    let (br, bc) = b.shape();
    Ok(ComplexMatrix::from_fn(rows, cols, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)]))
}

/// `tr(a^dagger b)`.
pub fn hs_inner<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<Complex<T>> {
    if a.shape() != b.shape() {
        return Err(mismatch("hs_inner", format!("{:?}", a.shape()), format!("{:?}", b.shape())));
    }
    if !a.is_square() {
        return Err(mismatch("hs_inner", "square operands", format!("{:?}", a.shape())));
    }
    Ok(a.as_slice().iter().zip(b.as_slice()).fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * y))
}

/// Singular values, non-increasing, `min(rows, cols)` of them.
pub fn singular_values<T: Real>(a: &ComplexMatrix<T>) -> Result<Vec<T>> {
    Ok(svd(a)?.singular_values)
}

pub fn trace_norm<T: Real>(a: &ComplexMatrix<T>) -> Result<T> {
    Ok(singular_values(a)?.into_iter().sum())
}

/// Reduced operator on the kept factor. Works for any square operator on the
/// bipartite space, not only states.
pub fn partial_trace<T: Real>(m: &ComplexMatrix<T>, dims: Dims, keep: Subsystem) -> Result<ComplexMatrix<T>> {
    dims.check_operator(m, "partial_trace")?;
    let Dims { na, nb } = dims;
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(na, na, |i, k| {
            (0..nb).fold(Complex::zero(), |acc, j| acc + m[(i * nb + j, k * nb + j)])
        }),
        Subsystem::B => ComplexMatrix::from_fn(nb, nb, |j, l| {
            (0..na).fold(Complex::zero(), |acc, i| acc + m[(i * nb + j, i * nb + l)])
        }),
    })
}

/// Row-major vectorization.
pub fn vec<T: Real>(a: &ComplexMatrix<T>) -> Vec<Complex<T>> {
    a.as_slice().to_vec()
}

pub fn unvec<T: Real>(v: &[Complex<T>], rows: usize, cols: usize) -> Result<ComplexMatrix<T>> {
    if v.len() != rows * cols {
        return Err(mismatch("unvec length", rows * cols, v.len()));
    }
    ComplexMatrix::from_row_major(rows, cols, v.to_vec())
}
