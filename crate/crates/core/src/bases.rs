//! Orthonormal operator bases and the coefficient matrix of a bipartite operator.

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{mismatch, Error, Result};
use crate::linalg::{kron, BipartiteState, ComplexMatrix, Dims};
use crate::scalar::{c, cr, Real};
use crate::schmidt::realign;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    MatrixUnits,
    GellMann,
}

/// `n^2` operators on `C^n`, orthonormal for `<A, B> = tr(A^dagger B)`.
#[derive(Debug, Clone)]
pub struct OperatorBasis<T: Real> {
    pub dim: usize,
    pub elements: Vec<ComplexMatrix<T>>,
    pub hermitian: bool,
    pub kind: BasisKind,
}

impl<T: Real> OperatorBasis<T> {
    /// Matrix whose row `a` is `vec(F_a)`; unitary for an orthonormal basis.
    fn stacked(&self) -> ComplexMatrix<T> {
        let n2 = self.dim * self.dim;
        ComplexMatrix::from_fn(n2, n2, |a, k| self.elements[a].as_slice()[k])
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::OutOfRange { name: "basis dimension", value: n.to_string(), range: ">= 2" });
    }
    Ok(())
}

/// `E_ij` with a single 1 at `(i, j)`, ordered row-major in `(i, j)`.
pub fn matrix_unit_basis<T: Real>(n: usize) -> Result<OperatorBasis<T>> {
    check_dim(n)?;
    let elements = (0..n * n)
        .map(|k| ComplexMatrix::from_fn(n, n, |i, j| if i * n + j == k { cr(T::one()) } else { Complex::zero() }))
        .collect();
    Ok(OperatorBasis { dim: n, elements, hermitian: false, kind: BasisKind::MatrixUnits })
}

/// `I/sqrt(n)` followed by the generalized Gell-Mann matrices scaled to unit
/// HS norm: symmetric pairs `i < j`, antisymmetric pairs `i < j`, then the
/// diagonal family `k = 1..n-1`. For `n = 2` this is `{I, X, Y, Z} / sqrt(2)`.
pub fn gell_mann_basis<T: Real>(n: usize) -> Result<OperatorBasis<T>> {
    check_dim(n)?;
    let inv_sqrt2 = T::one() / T::lit(2.0).sqrt();
    let mut elements = Vec::with_capacity(n * n);
    elements.push(ComplexMatrix::identity(n).scale_real(T::one() / T::lit(n as f64).sqrt()));
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    for &(i, j) in &pairs {
        let mut m = ComplexMatrix::zeros(n, n);
        m[(i, j)] = cr(inv_sqrt2);
        m[(j, i)] = cr(inv_sqrt2);
        elements.push(m);
    }
    for &(i, j) in &pairs {
        let mut m = ComplexMatrix::zeros(n, n);
        m[(i, j)] = c(T::zero(), -inv_sqrt2);
        m[(j, i)] = c(T::zero(), inv_sqrt2);
        elements.push(m);
    }
    for k in 1..n {
        let norm = T::lit((k * (k + 1)) as f64).sqrt();
        let diag: Vec<T> = (0..n)
            .map(|j| match j.cmp(&k) {
                std::cmp::Ordering::Less => T::one() / norm,
                std::cmp::Ordering::Equal => -T::lit(k as f64) / norm,
                std::cmp::Ordering::Greater => T::zero(),
            })
            .collect();
        elements.push(ComplexMatrix::diag_real(&diag));
    }
    Ok(OperatorBasis { dim: n, elements, hermitian: true, kind: BasisKind::GellMann })
}

/// `rho~[a, alpha] = tr((F_a (x) F_alpha)^dagger rho)`, so that
/// `rho = sum rho~[a, alpha] F_a (x) F_alpha` for every orthonormal basis pair.
#[derive(Debug, Clone)]
pub struct CoefficientMatrix<T: Real> {
    pub entries: ComplexMatrix<T>,
    pub basis_a: BasisKind,
    pub basis_b: BasisKind,
}

pub fn coefficient_matrix<T: Real>(s: &BipartiteState<T>, ba: &OperatorBasis<T>, bb: &OperatorBasis<T>) -> Result<CoefficientMatrix<T>> {
    coefficient_matrix_of(s.rho(), s.dims(), ba, bb)
}

/// Same as [`coefficient_matrix`] for any operator on the bipartite space.
///
/// Computed as `conj(FA) * realign(rho) * FB^dagger` with `FA`, `FB` the stacked
/// `vec`s of the basis elements.
pub fn coefficient_matrix_of<T: Real>(
    op: &ComplexMatrix<T>,
    dims: Dims,
    ba: &OperatorBasis<T>,
    bb: &OperatorBasis<T>,
) -> Result<CoefficientMatrix<T>> {
    if ba.dim != dims.na || bb.dim != dims.nb {
        return Err(mismatch("coefficient_matrix bases", format!("({}, {})", dims.na, dims.nb), format!("({}, {})", ba.dim, bb.dim)));
    }
    let r = realign(op, dims)?;
    let entries = ba.stacked().conj().matmul(&r)?.matmul(&bb.stacked().adjoint())?;
    Ok(CoefficientMatrix { entries, basis_a: ba.kind, basis_b: bb.kind })
}

/// `sum_{a, alpha} c[a, alpha] F_a (x) F_alpha`.
pub fn reconstruct<T: Real>(c: &CoefficientMatrix<T>, ba: &OperatorBasis<T>, bb: &OperatorBasis<T>) -> Result<ComplexMatrix<T>> {
    let (na2, nb2) = (ba.elements.len(), bb.elements.len());
    if c.entries.shape() != (na2, nb2) {
        return Err(mismatch("reconstruct", format!("{na2}x{nb2}"), format!("{:?}", c.entries.shape())));
    }
    let n = ba.dim * bb.dim;
    let mut out = ComplexMatrix::zeros(n, n);
    for (a, fa) in ba.elements.iter().enumerate() {
        for (alpha, fb) in bb.elements.iter().enumerate() {
            let w = c.entries[(a, alpha)];
            if !w.is_zero() {
                out = &out + &kron(fa, fb)?.scale(w);
            }
        }
    }
    Ok(out)
}

/// Bloch-type parametrization
/// `rho = (I (x) I + x_a L_a (x) I + y_b I (x) L_b + xi_ab L_a (x) L_b) / (N_A N_B)`
/// over unnormalized Gell-Mann matrices `L` (`tr(L_a L_b) = 2 delta_ab`).
#[derive(Debug, Clone)]
pub struct BlochForm<T: Real> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    /// Row-major `(N_A^2 - 1) x (N_B^2 - 1)`.
    pub xi: Vec<Vec<T>>,
}

/// Reads the Bloch coefficients off the Gell-Mann coefficient matrix `g`:
/// `x_a = g[a,0] N_A sqrt(N_B) / sqrt2`, `y_b = g[0,b] N_B sqrt(N_A) / sqrt2`,
/// `xi_ab = g[a,b] N_A N_B / 2`.
pub fn bloch_form<T: Real>(s: &BipartiteState<T>) -> Result<BlochForm<T>> {
    let Dims { na, nb } = s.dims();
    let g = coefficient_matrix(s, &gell_mann_basis(na)?, &gell_mann_basis(nb)?)?.entries;
    let (fa, fb) = (T::lit(na as f64), T::lit(nb as f64));
    let sqrt2 = T::lit(2.0).sqrt();
    let x = (1..na * na).map(|a| g[(a, 0)].re * fa * fb.sqrt() / sqrt2).collect();
    let y = (1..nb * nb).map(|b| g[(0, b)].re * fb * fa.sqrt() / sqrt2).collect();
    let xi = (1..na * na).map(|a| (1..nb * nb).map(|b| g[(a, b)].re * fa * fb / T::lit(2.0)).collect()).collect();
    Ok(BlochForm { x, y, xi })
}
