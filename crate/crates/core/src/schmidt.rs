//! Mixed-state Schmidt decomposition.
//!
//! A bipartite operator `rho` on `H_A (x) H_B` is expanded as
//! `rho = sum_a mu_a E_a^A (x) E_a^B` with Hilbert-Schmidt orthonormal local
//! operator systems. The coefficients `mu_a` are the singular values of the
//! realigned matrix, so everything here reduces to one SVD.

use num_complex::Complex;
use serde::Serialize;

use crate::bases::{gell_mann_basis, OperatorBasis};
use crate::error::{mismatch, Error, Result};
use crate::linalg::{hs_inner, kron, svd, trace_norm, unvec, BipartiteState, ComplexMatrix, Dims};
use crate::scalar::{cr, Real};

/// Schmidt coefficients, non-increasing and zero-padded to `min(N_A^2, N_B^2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtSpectrum<T: Real> {
    pub coeffs: Vec<T>,
    /// Count of coefficients strictly above `rank_tol * coeffs[0]`.
    pub rank: usize,
    pub rank_tol: T,
}

impl<T: Real> SchmidtSpectrum<T> {
    /// Sorts, pads/truncates to `len` and computes the rank.
    pub fn from_values(mut values: Vec<T>, len: usize, rank_tol: T) -> Self {
        values.iter_mut().for_each(|v| *v = v.max(T::zero()));
        values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        values.resize(len, T::zero());
        let cut = values.first().map_or(T::zero(), |&top| rank_tol * top);
        let rank = values.iter().take_while(|&&v| v > cut).count();
        Self { coeffs: values, rank, rank_tol }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Sum of coefficients, which is the CCN of the source operator.
    pub fn sum(&self) -> T {
        self.coeffs.iter().copied().sum()
    }

    pub fn sum_of_squares(&self) -> T {
        self.coeffs.iter().map(|&m| m * m).sum()
    }

    /// Smallest retained and largest discarded coefficient, for judging how
    /// sensitive the rank is to `rank_tol`.
    pub fn rank_sensitivity(&self) -> (Option<T>, Option<T>) {
        let kept = self.rank.checked_sub(1).map(|i| self.coeffs[i]);
        let dropped = self.coeffs.get(self.rank).copied();
        (kept, dropped)
    }

    /// Multiplies every coefficient by `factor`; the rank is unchanged.
    pub fn scaled(&self, factor: T) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&m| m * factor).collect(), rank: self.rank, rank_tol: self.rank_tol }
    }
}

/// Full decomposition `rho = sum_a mu_a ops_a[a] (x) ops_b[a]`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition<T: Real> {
    pub spectrum: SchmidtSpectrum<T>,
    pub ops_a: Vec<ComplexMatrix<T>>,
    pub ops_b: Vec<ComplexMatrix<T>>,
}

impl<T: Real> SchmidtDecomposition<T> {
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let n = self.ops_a[0].rows() * self.ops_b[0].rows();
        self.spectrum.coeffs.iter().zip(self.ops_a.iter().zip(&self.ops_b)).fold(
            ComplexMatrix::zeros(n, n),
            |acc, (&mu, (a, b))| &acc + &kron(a, b).expect("local operators").scale_real(mu),
        )
    }
}

/// Elementary symmetric polynomials of the Schmidt coefficients;
/// `values[l - 1]` is the degree-`l` polynomial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetricPolynomials<T: Real> {
    pub values: Vec<T>,
}

impl<T: Real> SymmetricPolynomials<T> {
    pub fn degree(&self, l: usize) -> Option<T> {
        l.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }
}

/// Realignment (reshuffling) `R[(i*N_A + j), (k*N_B + l)] = rho[(i*N_B + k), (j*N_B + l)]`.
///
/// Product operators map to rank one: `realign(A (x) B) = vec(A) vec(B)^T`.
pub fn realign<T: Real>(op: &ComplexMatrix<T>, dims: Dims) -> Result<ComplexMatrix<T>> {
    dims.check_operator(op, "realign")?;
    let Dims { na, nb } = dims;
    Ok(ComplexMatrix::from_fn(na * na, nb * nb, |r, c| {
        let (i, j) = (r / na, r % na);
        let (k, l) = (c / nb, c % nb);
        op[(i * nb + k, j * nb + l)]
    }))
}

/// Inverse of [`realign`].
pub fn unrealign<T: Real>(r: &ComplexMatrix<T>, dims: Dims) -> Result<ComplexMatrix<T>> {
    let Dims { na, nb } = dims;
    if r.shape() != (na * na, nb * nb) {
        return Err(mismatch("unrealign", format!("{}x{}", na * na, nb * nb), format!("{}x{}", r.rows(), r.cols())));
    }
    let n = na * nb;
    Ok(ComplexMatrix::from_fn(n, n, |row, col| {
        let (i, k) = (row / nb, row % nb);
        let (j, l) = (col / nb, col % nb);
        r[(i * na + j, k * nb + l)]
    }))
}

/// Schmidt spectrum of an arbitrary operator on the bipartite space.
pub fn spectrum_of<T: Real>(op: &ComplexMatrix<T>, dims: Dims, rank_tol: T) -> Result<SchmidtSpectrum<T>> {
    let sv = svd(&realign(op, dims)?)?.singular_values;
    Ok(SchmidtSpectrum::from_values(sv, dims.schmidt_len(), rank_tol))
}

pub fn schmidt_spectrum<T: Real>(s: &BipartiteState<T>, rank_tol: T) -> Result<SchmidtSpectrum<T>> {
    spectrum_of(s.rho(), s.dims(), rank_tol)
}

/// Operator pairs from the SVD of the realigned matrix, `R = U S V^dagger`:
/// `ops_a[a] = unvec(U[:, a])`, `ops_b[a] = unvec(conj(V[:, a]))`.
pub fn decomposition_of<T: Real>(op: &ComplexMatrix<T>, dims: Dims, rank_tol: T) -> Result<SchmidtDecomposition<T>> {
    let d = dims.schmidt_len();
    let f = svd(&realign(op, dims)?)?;
    let spectrum = SchmidtSpectrum::from_values(f.singular_values.clone(), d, rank_tol);
    let mut ops_a = Vec::with_capacity(d);
    let mut ops_b = Vec::with_capacity(d);
    for a in 0..d {
        ops_a.push(unvec(&f.u.column(a), dims.na, dims.na)?);
        let vb: Vec<Complex<T>> = f.v.column(a).iter().map(|z| z.conj()).collect();
        ops_b.push(unvec(&vb, dims.nb, dims.nb)?);
    }
    Ok(SchmidtDecomposition { spectrum, ops_a, ops_b })
}

pub fn schmidt_decomposition<T: Real>(s: &BipartiteState<T>, rank_tol: T) -> Result<SchmidtDecomposition<T>> {
    decomposition_of(s.rho(), s.dims(), rank_tol)
}

/// Decomposition whose local operators are observables (Hermitian).
///
/// Expands `rho` over Hermitian orthonormal local bases, where the coefficient
/// matrix `T[a, b] = tr((G_a (x) H_b) rho)` is real, and takes its real SVD.
/// Each coefficient then satisfies `mu_c = tr((E_c^A (x) E_c^B) rho)`.
pub fn observables_of<T: Real>(op: &ComplexMatrix<T>, dims: Dims, rank_tol: T, herm_tol: T) -> Result<SchmidtDecomposition<T>> {
    dims.check_operator(op, "schmidt_observables")?;
    let dev = op.hermitian_deviation();
    if dev > herm_tol {
        return Err(Error::InvalidState(vec![crate::Violation::NotHermitian { deviation: dev.as_f64() }]));
    }
    let ga = gell_mann_basis::<T>(dims.na)?;
    let gb = gell_mann_basis::<T>(dims.nb)?;
    let coeff = crate::bases::coefficient_matrix_of(op, dims, &ga, &gb)?;
    let real = coeff.entries.map(|z| cr(z.re));
    let f = svd(&real)?;
    let d = dims.schmidt_len();
    let spectrum = SchmidtSpectrum::from_values(f.singular_values.clone(), d, rank_tol);
    let combine = |basis: &OperatorBasis<T>, weights: Vec<Complex<T>>| {
        let n = basis.dim;
        basis.elements.iter().zip(weights).fold(ComplexMatrix::zeros(n, n), |acc, (g, w)| &acc + &g.scale_real(w.re))
    };
    let ops_a = (0..d).map(|c| combine(&ga, f.u.column(c))).collect();
    let ops_b = (0..d).map(|c| combine(&gb, f.v.column(c))).collect();
    Ok(SchmidtDecomposition { spectrum, ops_a, ops_b })
}

pub fn schmidt_observables<T: Real>(s: &BipartiteState<T>, rank_tol: T) -> Result<SchmidtDecomposition<T>> {
    observables_of(s.rho(), s.dims(), rank_tol, T::default_tol())
}

/// Computable cross norm: the trace norm of the realigned operator, equal to
/// the sum of Schmidt coefficients. Accepts any operator, not only states.
pub fn ccn<T: Real>(op: &ComplexMatrix<T>, dims: Dims) -> Result<T> {
    trace_norm(&realign(op, dims)?)
}

/// Elementary symmetric polynomials `e_1 .. e_d` by the incremental product
/// recursion over `prod_a (1 + mu_a x)`.
pub fn elementary_symmetric<T: Real>(values: &[T]) -> Vec<T> {
    let d = values.len();
    let mut e = vec![T::zero(); d + 1];
    e[0] = T::one();
    for (count, &mu) in values.iter().enumerate() {
        for l in (1..=count + 1).rev() {
            e[l] = e[l] + mu * e[l - 1];
        }
    }
    e.split_off(1)
}

pub fn symmetric_polynomials<T: Real>(sp: &SchmidtSpectrum<T>) -> SymmetricPolynomials<T> {
    SymmetricPolynomials { values: elementary_symmetric(&sp.coeffs) }
}

/// Same Schmidt class: sorted spectra agree componentwise within `tol`.
pub fn schmidt_equivalent<T: Real>(s1: &BipartiteState<T>, s2: &BipartiteState<T>, tol: T) -> Result<bool> {
    if s1.dims() != s2.dims() {
        return Err(mismatch("schmidt_equivalent", format!("{:?}", s1.dims()), format!("{:?}", s2.dims())));
    }
    let a = schmidt_spectrum(s1, T::zero())?;
    let b = schmidt_spectrum(s2, T::zero())?;
    Ok(a.coeffs.iter().zip(&b.coeffs).all(|(x, y)| (*x - *y).abs() <= tol))
}

/// `tr((A (x) B) rho)` for local observables; the measurable form of a
/// Schmidt coefficient.
pub fn local_expectation<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>, rho: &ComplexMatrix<T>) -> Result<Complex<T>> {
    let ab = kron(a, b)?;
    // tr(X rho) = <X^dagger, rho>
    hs_inner(&ab.adjoint(), rho)
}
