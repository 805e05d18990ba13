//! Quantum channels in Kraus form and the entanglement-breaking test.
//!
//! A channel `E: L(C^in) -> L(C^out)` is entanglement breaking iff its Choi
//! state `(1/in) sum_{ab} E(|a><b|) (x) |a><b|` is separable. The channel
//! coefficient matrix `E~[a][alpha] = tr(F_a^dagger E(F_alpha^dagger))` over
//! matrix units has singular values `in` times the Choi state's Schmidt
//! coefficients, so any Schmidt-coefficient criterion becomes a channel test.

use num_complex::Complex;
use serde::Serialize;

use crate::criteria::{sympoly_evaluate, CriterionReport, Param, SuperOperator, Verdict};
use crate::error::{mismatch, Error, Result};
use crate::linalg::{hermitian_function, kron, singular_values, BipartiteState, ComplexMatrix, Dims, Tolerances};
use crate::scalar::{c, cr, Real};
use crate::schmidt::SchmidtSpectrum;
use crate::states::{Sampler, Seed};

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel<T: Real> {
    kraus: Vec<ComplexMatrix<T>>,
    in_dim: usize,
    out_dim: usize,
}

impl<T: Real> QuantumChannel<T> {
    /// Validates shapes and trace preservation `sum K^dagger K = I` to `tol`
    /// (max-abs entry deviation).
    pub fn new(kraus: Vec<ComplexMatrix<T>>, tol: T) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::OutOfRange { name: "kraus operators", value: "0".into(), range: ">= 1" });
        };
        let (out_dim, in_dim) = first.shape();
        if in_dim == 0 || out_dim == 0 {
            return Err(mismatch("kraus operator", "non-empty", "0-dimensional"));
        }
        let mut completeness = ComplexMatrix::zeros(in_dim, in_dim);
        for k in &kraus {
            if k.shape() != (out_dim, in_dim) {
                return Err(mismatch("kraus operator", format!("{out_dim}x{in_dim}"), format!("{}x{}", k.rows(), k.cols())));
            }
            completeness = &completeness + &k.adjoint().matmul(k)?;
        }
        let deviation = completeness.max_abs_diff(&ComplexMatrix::identity(in_dim)).unwrap_or(T::infinity());
        if deviation > tol {
            return Err(Error::NotTracePreserving { deviation: deviation.as_f64() });
        }
        Ok(Self { kraus, in_dim, out_dim })
    }

    pub fn kraus(&self) -> &[ComplexMatrix<T>] {
        &self.kraus
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn apply(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if rho.shape() != (self.in_dim, self.in_dim) {
            return Err(mismatch("channel input", format!("{0}x{0}", self.in_dim), format!("{}x{}", rho.rows(), rho.cols())));
        }
        let mut out = ComplexMatrix::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            out = &out + &k.sandwich(rho)?;
        }
        Ok(out)
    }

    /// The channel as a linear superoperator, kernel `sum_k K (x) conj(K)`.
    pub fn to_superoperator(&self) -> Result<SuperOperator<T>> {
        let mut kernel = ComplexMatrix::zeros(self.out_dim * self.out_dim, self.in_dim * self.in_dim);
        for k in &self.kraus {
            kernel = &kernel + &kron(k, &k.conj())?;
        }
        SuperOperator::new(self.in_dim, self.out_dim, kernel, false)
    }
}

pub fn apply_channel<T: Real>(ch: &QuantumChannel<T>, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    ch.apply(rho)
}

fn unit<T: Real>(n: usize, i: usize, j: usize) -> ComplexMatrix<T> {
    let mut m = ComplexMatrix::zeros(n, n);
    m[(i, j)] = cr(T::one());
    m
}

/// `(1/in) sum_{ab} E(|a><b|) (x) |a><b|` on `C^out (x) C^in`.
pub fn choi_state<T: Real>(ch: &QuantumChannel<T>) -> Result<BipartiteState<T>> {
    let (nin, nout) = (ch.in_dim, ch.out_dim);
    let mut rho = ComplexMatrix::zeros(nin * nout, nin * nout);
    for a in 0..nin {
        for b in 0..nin {
            let e = unit::<T>(nin, a, b);
            rho = &rho + &kron(&ch.apply(&e)?, &e)?;
        }
    }
    Ok(BipartiteState::new_unchecked(rho.scale_real(T::one() / T::lit(nin as f64)), Dims::new(nout, nin)))
}

/// `E~` over matrix units: row `a = i*out + j` for `F_a = |i><j|` on the
/// output, column `alpha = k*in + l` for `F_alpha = |k><l|` on the input.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelCoeffMatrix<T: Real> {
    pub entries: ComplexMatrix<T>,
    pub in_dim: usize,
    pub out_dim: usize,
}

impl<T: Real> ChannelCoeffMatrix<T> {
    /// Spectrum of `E~ / in`, i.e. the Choi state's Schmidt coefficients,
    /// padded to `min(out^2, in^2)`.
    pub fn normalized_spectrum(&self, rank_tol: T) -> Result<SchmidtSpectrum<T>> {
        let sv = singular_values(&self.entries)?;
        let scale = T::one() / T::lit(self.in_dim as f64);
        let len = (self.in_dim * self.in_dim).min(self.out_dim * self.out_dim);
        Ok(SchmidtSpectrum::from_values(sv.into_iter().map(|x| x * scale).collect(), len, rank_tol))
    }
}

pub fn channel_coeff_matrix<T: Real>(ch: &QuantumChannel<T>) -> Result<ChannelCoeffMatrix<T>> {
    let (nin, nout) = (ch.in_dim, ch.out_dim);
    let mut entries = ComplexMatrix::zeros(nout * nout, nin * nin);
    for k in 0..nin {
        for l in 0..nin {
            // E(F_alpha^dagger) = E(|l><k|); tr(F_a^dagger Y) = Y[i][j]
            let image = ch.apply(&unit(nin, l, k))?;
            for (a, z) in image.as_slice().iter().enumerate() {
                entries[(a, k * nin + l)] = *z;
            }
        }
    }
    Ok(ChannelCoeffMatrix { entries, in_dim: nin, out_dim: nout })
}

/// Symmetric-polynomial test on the Choi state, reported in channel units:
/// `lhs = S_l(sv(E~))`, bound scaled by `in^l`. Detection means the channel is
/// not entanglement breaking.
pub fn eb_check<T: Real>(ch: &QuantumChannel<T>, l: usize, use_rank: bool, tols: &Tolerances<T>) -> Result<CriterionReport<T>> {
    let spectrum = channel_coeff_matrix(ch)?.normalized_spectrum(tols.rank)?;
    let mut report = sympoly_evaluate(&spectrum, l, use_rank, tols)?;
    let scale = T::lit(ch.in_dim as f64).powi(l as i32);
    report.criterion_id = "eb".into();
    report.lhs = report.lhs * scale;
    report.bound = report.bound * scale;
    report.margin = report.lhs - report.bound;
    for key in ["bound_rank_free", "bound_rank_aware"] {
        if let Some(Param::Real(b)) = report.params.get_mut(key) {
            *b = *b * scale;
        }
    }
    if report.verdict == Verdict::EntanglementDetected {
        report.verdict = Verdict::NotEntanglementBreaking;
    }
    Ok(report)
}

pub fn identity_channel<T: Real>(n: usize) -> Result<QuantumChannel<T>> {
    QuantumChannel::new(vec![ComplexMatrix::identity(n)], T::default_tol())
}

/// Weyl-Heisenberg operator `X^a Z^b`, `X|j> = |j+1>`, `Z|j> = w^j |j>`.
pub fn weyl<T: Real>(n: usize, a: usize, b: usize) -> ComplexMatrix<T> {
    let tau = T::lit(2.0) * T::PI() / T::lit(n as f64);
    ComplexMatrix::from_fn(n, n, |row, col| {
        if row == (col + a) % n {
            let phase = tau * T::lit(((b * col) % n) as f64);
            c(phase.cos(), phase.sin())
        } else {
            Complex::new(T::zero(), T::zero())
        }
    })
}

/// `rho -> (1 - p) rho + p tr(rho) I/n`, `p` in `[0, 1]`.
///
/// Kraus form: `sqrt(1 - p + p/n^2) I` and `sqrt(p/n^2) X^a Z^b` for
/// `(a, b) != (0, 0)`. The Choi state is isotropic with fidelity `1 - p + p/n^2`.
pub fn depolarizing_channel<T: Real>(n: usize, p: T) -> Result<QuantumChannel<T>> {
    if n < 2 {
        return Err(Error::OutOfRange { name: "n", value: n.to_string(), range: ">= 2" });
    }
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::OutOfRange { name: "p", value: p.to_string(), range: "[0, 1]" });
    }
    let n2 = T::lit((n * n) as f64);
    let mut kraus = vec![ComplexMatrix::identity(n).scale_real((T::one() - p + p / n2).sqrt())];
    let w = (p / n2).sqrt();
    for a in 0..n {
        for b in 0..n {
            if (a, b) != (0, 0) {
                kraus.push(weyl::<T>(n, a, b).scale_real(w));
            }
        }
    }
    QuantumChannel::new(kraus, T::default_tol())
}

/// Haar-like random channel with `k` Kraus operators: an isometry
/// `V = G (G^dagger G)^{-1/2}` from a stacked Ginibre `G`, split into blocks.
pub fn random_channel<T: Real>(in_dim: usize, out_dim: usize, k: usize, seed: Seed) -> Result<QuantumChannel<T>> {
    if k * out_dim < in_dim {
        return Err(Error::OutOfRange { name: "kraus count", value: k.to_string(), range: "k * out >= in" });
    }
    let g = Sampler::new(seed).ginibre::<T>(k * out_dim, in_dim);
    let inv_sqrt = hermitian_function(&g.adjoint().matmul(&g)?, |x| T::one() / x.sqrt())?;
    let v = g.matmul(&inv_sqrt)?;
    let kraus = (0..k)
        .map(|b| ComplexMatrix::from_fn(out_dim, in_dim, |i, j| v[(b * out_dim + i, j)]))
        .collect();
    QuantumChannel::new(kraus, T::default_tol())
}

/// Summary of an `eb_check` sweep, for reporting.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelSummary<T: Real> {
    pub in_dim: usize,
    pub out_dim: usize,
    pub kraus_count: usize,
    pub coefficient_singular_values: Vec<T>,
}

pub fn channel_summary<T: Real>(ch: &QuantumChannel<T>) -> Result<ChannelSummary<T>> {
    Ok(ChannelSummary {
        in_dim: ch.in_dim,
        out_dim: ch.out_dim,
        kraus_count: ch.kraus.len(),
        coefficient_singular_values: singular_values(&channel_coeff_matrix(ch)?.entries)?,
    })
}
