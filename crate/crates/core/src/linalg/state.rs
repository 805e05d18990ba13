use serde::Serialize;

use super::{hermitian_eigen, ComplexMatrix};
use crate::error::{mismatch, Error, Result, Violation};
use crate::scalar::{cr, Real};

/// Local dimensions `(N_A, N_B)` of a bipartite space.
///
/// Composite index convention, used everywhere in the crate: `|i>_A (x) |j>_B`
/// is row `i * nb + j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Dims {
    pub na: usize,
    pub nb: usize,
}

impl Dims {
    pub const fn new(na: usize, nb: usize) -> Self {
        Self { na, nb }
    }

    pub const fn total(self) -> usize {
        self.na * self.nb
    }

    /// Number of Schmidt coefficients, `min(N_A^2, N_B^2)`.
    pub fn schmidt_len(self) -> usize {
        (self.na * self.na).min(self.nb * self.nb)
    }

    pub(crate) fn check_operator<T: Real>(self, m: &ComplexMatrix<T>, context: &'static str) -> Result<()> {
        let n = self.total();
        if m.shape() != (n, n) {
            return Err(mismatch(context, format!("{n}x{n} for {}x{}", self.na, self.nb), format!("{}x{}", m.rows(), m.cols())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Numerical thresholds. Every field defaults to [`Real::default_tol`] (`1e-9`
/// in double precision).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances<T: Real> {
    pub hermitian: T,
    pub trace: T,
    pub positivity: T,
    /// Relative cutoff for the Schmidt rank: coefficient counts iff `> rank * mu_1`.
    pub rank: T,
    /// Band around a bound inside which a criterion stays inconclusive.
    pub decision: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        let t = T::default_tol();
        Self { hermitian: t, trace: t, positivity: t, rank: t, decision: t }
    }
}

impl<T: Real> Tolerances<T> {
    /// Sets the three density-validation tolerances at once.
    pub fn with_validation(mut self, tol: T) -> Self {
        self.hermitian = tol;
        self.trace = tol;
        self.positivity = tol;
        self
    }
}

/// A density operator on `H_A (x) H_B`, validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState<T: Real> {
    rho: ComplexMatrix<T>,
    dims: Dims,
}

impl<T: Real> BipartiteState<T> {
    /// Validates with default tolerances.
    pub fn new(rho: ComplexMatrix<T>, na: usize, nb: usize) -> Result<Self> {
        validate_density(rho, na, nb, &Tolerances::default())
    }

    /// Skips validation; the caller vouches for the matrix (or wants to probe an
    /// unphysical operator).
    pub fn new_unchecked(rho: ComplexMatrix<T>, dims: Dims) -> Self {
        Self { rho, dims }
    }

    pub fn rho(&self) -> &ComplexMatrix<T> {
        &self.rho
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.rho
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn na(&self) -> usize {
        self.dims.na
    }

    pub fn nb(&self) -> usize {
        self.dims.nb
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> T {
        // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        self.rho.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn marginal(&self, keep: Subsystem) -> ComplexMatrix<T> {
        super::partial_trace(&self.rho, self.dims, keep).expect("dims checked at construction")
    }
}

/// Checks that `m` is a density operator on `C^na (x) C^nb`.
///
/// Every violated invariant is reported with its measured magnitude.
pub fn validate_density<T: Real>(m: ComplexMatrix<T>, na: usize, nb: usize, tols: &Tolerances<T>) -> Result<BipartiteState<T>> {
    if na < 2 || nb < 2 {
        return Err(Error::OutOfRange { name: "local dimension", value: format!("({na}, {nb})"), range: ">= 2" });
    }
    let dims = Dims::new(na, nb);
    dims.check_operator(&m, "validate_density")?;
    if let Some(k) = m.as_slice().iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite { row: k / m.cols(), col: k % m.cols() });
    }

    let mut violations = Vec::new();
    let herm = m.hermitian_deviation();
    if herm > tols.hermitian {
        violations.push(Violation::NotHermitian { deviation: herm.as_f64() });
    }
    let tr_dev = (m.trace() - cr(T::one())).norm();
    if tr_dev > tols.trace {
        violations.push(Violation::TraceNotOne { deviation: tr_dev.as_f64() });
    }
    let min_eig = hermitian_eigen(&m)?.values[0];
    if min_eig < -tols.positivity {
        violations.push(Violation::NotPositive { min_eigenvalue: min_eig.as_f64() });
    }
    if violations.is_empty() {
        Ok(BipartiteState { rho: m, dims })
    } else {
        Err(Error::InvalidState(violations))
    }
}
