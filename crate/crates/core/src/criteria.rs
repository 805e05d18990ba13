//! Separability criteria built on Schmidt coefficients.
//!
//! Each check returns a [`CriterionReport`] recording `lhs`, `bound` and the
//! verdict. Every criterion is a necessary condition for separability, so a
//! verdict is either "entanglement detected" (`lhs > bound + decision_tol`) or
//! inconclusive; nothing here certifies separability.
//!
//! The transform criteria follow one template. `n` pairs of superoperators
//! `(E_k^A, E_k^B)` define
//!
//! ```text
//! T(rho) = (1/n) sum_k (E_k^A (x) E_k^B)(rho) + (1/n) sum_{k != l} (E_k^A (x) E_l^B)(rho_A (x) rho_B)
//! ```
//!
//! and for separable `rho`, provided `sum_k ||E_k(sigma_k)||_HS^2 <= n eps` on
//! each side,
//!
//! ```text
//! ccn(T(rho)) <= sqrt((eps_A + (1/n) sum_{k<l} 2 Re<E_k^A(rho_A), E_l^A(rho_A)>) * (same for B))
//! ```

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{mismatch, Error, Result};
use crate::linalg::{hs_inner, kron, partial_trace, singular_values, BipartiteState, ComplexMatrix, Dims, Subsystem, Tolerances};
use crate::scalar::{c, cr, Real};
use crate::schmidt::{ccn, realign, schmidt_spectrum, symmetric_polynomials, unrealign, SchmidtSpectrum};
use crate::states::{Sampler, Seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    EntanglementDetected,
    /// Channel verdict: the Choi state is entangled.
    #[serde(rename = "NotEB")]
    NotEntanglementBreaking,
    Inconclusive,
}

impl Verdict {
    pub fn is_detection(self) -> bool {
        !matches!(self, Verdict::Inconclusive)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Param<T: Real> {
    Int(i64),
    Real(T),
    Text(String),
}

impl<T: Real> From<usize> for Param<T> {
    fn from(v: usize) -> Self {
        Param::Int(v as i64)
    }
}

impl<T: Real> From<&str> for Param<T> {
    fn from(v: &str) -> Self {
        Param::Text(v.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport<T: Real> {
    pub criterion_id: String,
    pub lhs: T,
    pub bound: T,
    pub margin: T,
    pub verdict: Verdict,
    pub params: BTreeMap<String, Param<T>>,
}

impl<T: Real> CriterionReport<T> {
    pub fn decide(criterion_id: impl Into<String>, lhs: T, bound: T, decision_tol: T) -> Self {
        let margin = lhs - bound;
        let verdict = if margin > decision_tol { Verdict::EntanglementDetected } else { Verdict::Inconclusive };
        Self { criterion_id: criterion_id.into(), lhs, bound, margin, verdict, params: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: impl Into<Param<T>>) -> Self {
        self.params.insert(key.to_owned(), value.into());
        self
    }

    pub fn with_real(self, key: &str, value: T) -> Self {
        self.with(key, Param::Real(value))
    }

    pub fn detected(&self) -> bool {
        self.verdict.is_detection()
    }
}

/// Realignment / CCN criterion: `sum mu_a <= 1` for separable states.
pub fn rc_check<T: Real>(s: &BipartiteState<T>, tols: &Tolerances<T>) -> Result<CriterionReport<T>> {
    let lhs = ccn(s.rho(), s.dims())?;
    Ok(CriterionReport::decide("rc", lhs, T::one(), tols.decision))
}

/// `C(n, l) / n^l`, computed as a running product.
fn binomial_over_power<T: Real>(n: usize, l: usize) -> T {
    (0..l).fold(T::one(), |acc, i| acc * T::lit((n - i) as f64) / T::lit((n * (i + 1)) as f64))
}

/// Symmetric-polynomial bound check on a precomputed spectrum.
///
/// Rank-free: `M^[l] <= C(d, l) / d^l` (at `l = d`, the determinant bound
/// `(1/d)^d`). Rank-aware: `M^[l] <= C(R, l) / R^l` for `l <= R`, else `0`.
/// Rank-aware `l > R` detections additionally need `lhs > rank_tol * d`, since
/// there `lhs` is made only of coefficients the rank cut discarded.
pub fn sympoly_evaluate<T: Real>(sp: &SchmidtSpectrum<T>, l: usize, use_rank: bool, tols: &Tolerances<T>) -> Result<CriterionReport<T>> {
    let d = sp.len();
    if l == 0 || l > d {
        return Err(Error::OutOfRange { name: "l", value: l.to_string(), range: "1..=d" });
    }
    let m = symmetric_polynomials(sp);
    let lhs = m.values[l - 1];
    let r = sp.rank;
    let bound_free = binomial_over_power::<T>(d, l);
    let bound_rank = if l <= r { binomial_over_power::<T>(r, l) } else { T::zero() };
    let bound = if use_rank { bound_rank } else { bound_free };
    let mut report = CriterionReport::decide("sympoly", lhs, bound, tols.decision)
        .with("l", l)
        .with("rank", r)
        .with("mode", if use_rank { "rank" } else { "rank-free" })
        .with_real("bound_rank_free", bound_free)
        .with_real("bound_rank_aware", bound_rank)
        .with_real("rank_tol", sp.rank_tol);
    let (kept, dropped) = sp.rank_sensitivity();
    if let Some(k) = kept {
        report = report.with_real("smallest_retained", k);
    }
    if let Some(x) = dropped {
        report = report.with_real("largest_discarded", x);
    }
    if use_rank && l > r {
        report = report.with("advisory", "l exceeds the numerical Schmidt rank; bound 0 depends on rank_tol");
        if lhs <= sp.rank_tol * T::lit(d as f64) {
            report.verdict = Verdict::Inconclusive;
        }
    }
    Ok(report)
}

pub fn sympoly_check<T: Real>(s: &BipartiteState<T>, l: usize, use_rank: bool, tols: &Tolerances<T>) -> Result<CriterionReport<T>> {
    sympoly_evaluate(&schmidt_spectrum(s, tols.rank)?, l, use_rank, tols)
}

/// A superoperator `L(C^in) -> L(C^out)` stored as a matrix acting on
/// row-major `vec`s. An antilinear superoperator acts as
/// `X -> kernel(conj(X))`, conjugation taken entrywise in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator<T: Real> {
    in_dim: usize,
    out_dim: usize,
    kernel: ComplexMatrix<T>,
    antilinear: bool,
}

impl<T: Real> SuperOperator<T> {
    pub fn new(in_dim: usize, out_dim: usize, kernel: ComplexMatrix<T>, antilinear: bool) -> Result<Self> {
        if kernel.shape() != (out_dim * out_dim, in_dim * in_dim) {
            return Err(mismatch(
                "superoperator kernel",
                format!("{}x{}", out_dim * out_dim, in_dim * in_dim),
                format!("{}x{}", kernel.rows(), kernel.cols()),
            ));
        }
        Ok(Self { in_dim, out_dim, kernel, antilinear })
    }

    pub fn identity(n: usize) -> Self {
        Self { in_dim: n, out_dim: n, kernel: ComplexMatrix::identity(n * n), antilinear: false }
    }

    /// Kernel of a linear map, sampled on matrix units.
    pub fn from_linear_map(in_dim: usize, out_dim: usize, f: impl Fn(&ComplexMatrix<T>) -> ComplexMatrix<T>) -> Result<Self> {
        let mut kernel = ComplexMatrix::zeros(out_dim * out_dim, in_dim * in_dim);
        for col in 0..in_dim * in_dim {
            let mut unit = ComplexMatrix::zeros(in_dim, in_dim);
            unit[(col / in_dim, col % in_dim)] = cr(T::one());
            let image = f(&unit);
            if image.shape() != (out_dim, out_dim) {
                return Err(mismatch("linear map output", format!("{out_dim}x{out_dim}"), format!("{:?}", image.shape())));
            }
            for (row, z) in image.as_slice().iter().enumerate() {
                kernel[(row, col)] = *z;
            }
        }
        Ok(Self { in_dim, out_dim, kernel, antilinear: false })
    }

    /// `X -> L X L^dagger`, kernel `L (x) conj(L)` in row-major vec.
    pub fn conjugation(l: &ComplexMatrix<T>) -> Result<Self> {
        let kernel = kron(l, &l.conj())?;
        Self::new(l.cols(), l.rows(), kernel, false)
    }

    pub fn scaled(mut self, factor: Complex<T>) -> Self {
        self.kernel = self.kernel.scale(factor);
        self
    }

    pub fn into_antilinear(mut self) -> Self {
        self.antilinear = true;
        self
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kernel(&self) -> &ComplexMatrix<T> {
        &self.kernel
    }

    pub fn is_antilinear(&self) -> bool {
        self.antilinear
    }

    pub fn apply(&self, x: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if x.shape() != (self.in_dim, self.in_dim) {
            return Err(mismatch("superoperator input", format!("{0}x{0}", self.in_dim), format!("{:?}", x.shape())));
        }
        let input = if self.antilinear { x.conj() } else { x.clone() };
        let out = self.kernel.mat_vec(input.as_slice())?;
        ComplexMatrix::from_row_major(self.out_dim, self.out_dim, out)
    }
}

/// `(E^A (x) E^B)(x)` for an operator on the bipartite space.
///
/// Uses `realign((E^A (x) E^B)(X)) = K_A realign(X) K_B^T`, which holds on
/// product operators and extends by linearity.
pub fn apply_product_superop<T: Real>(
    ea: &SuperOperator<T>,
    eb: &SuperOperator<T>,
    x: &ComplexMatrix<T>,
    dims: Dims,
) -> Result<ComplexMatrix<T>> {
    if ea.antilinear != eb.antilinear {
        return Err(Error::MixedLinearity);
    }
    if ea.in_dim != dims.na || eb.in_dim != dims.nb {
        return Err(mismatch("product superoperator", format!("({}, {})", dims.na, dims.nb), format!("({}, {})", ea.in_dim, eb.in_dim)));
    }
    let input = if ea.antilinear { x.conj() } else { x.clone() };
    let r = realign(&input, dims)?;
    let mapped = ea.kernel.matmul(&r)?.matmul(&eb.kernel.transpose())?;
    unrealign(&mapped, Dims::new(ea.out_dim, eb.out_dim))
}

/// `n` superoperator pairs plus the constants `eps_A`, `eps_B` for which the
/// caller asserts the norm hypotheses. Those hypotheses quantify over all
/// states and are not verified here; see [`estimate_eps`].
#[derive(Debug, Clone)]
pub struct TransformSpec<T: Real> {
    pairs: Vec<(SuperOperator<T>, SuperOperator<T>)>,
    eps_a: T,
    eps_b: T,
}

impl<T: Real> TransformSpec<T> {
    pub fn new(pairs: Vec<(SuperOperator<T>, SuperOperator<T>)>, eps_a: T, eps_b: T) -> Result<Self> {
        let Some((first_a, first_b)) = pairs.first() else {
            return Err(Error::OutOfRange { name: "n", value: "0".into(), range: ">= 1" });
        };
        let antilinear = first_a.antilinear;
        let (na, nb) = (first_a.in_dim, first_b.in_dim);
        for (a, b) in &pairs {
            if a.antilinear != antilinear || b.antilinear != antilinear {
                return Err(Error::MixedLinearity);
            }
            if (a.in_dim, a.out_dim, b.in_dim, b.out_dim) != (na, na, nb, nb) {
                return Err(mismatch(
                    "transform pair dims",
                    format!("A {na}->{na}, B {nb}->{nb}"),
                    format!("A {}->{}, B {}->{}", a.in_dim, a.out_dim, b.in_dim, b.out_dim),
                ));
            }
        }
        for (name, eps) in [("eps_a", eps_a), ("eps_b", eps_b)] {
            if !(eps >= T::zero() && eps.is_finite()) {
                return Err(Error::OutOfRange { name, value: eps.to_string(), range: "[0, inf)" });
            }
        }
        Ok(Self { pairs, eps_a, eps_b })
    }

    /// One pair of identities with `eps = 1`: reduces to the realignment criterion.
    pub fn identity(na: usize, nb: usize) -> Self {
        Self { pairs: vec![(SuperOperator::identity(na), SuperOperator::identity(nb))], eps_a: T::one(), eps_b: T::one() }
    }

    /// `E_1^A = e^{i theta} I`, `E_1^B = e^{-i theta} I`, `E_2 = -I`, `eps = 1`.
    pub fn theta(na: usize, nb: usize, theta: T) -> Self {
        let (s, co) = theta.sin_cos();
        let minus = cr(-T::one());
        Self {
            pairs: vec![
                (SuperOperator::identity(na).scaled(c(co, s)), SuperOperator::identity(nb).scaled(c(co, -s))),
                (SuperOperator::identity(na).scaled(minus), SuperOperator::identity(nb).scaled(minus)),
            ],
            eps_a: T::one(),
            eps_b: T::one(),
        }
    }

    /// Local filtering: `E_1 = L . L^dagger`, `E_2^A = i E_1^A`, `E_2^B = -i E_1^B`.
    /// `eps = 1` is valid when both filters are contractions.
    pub fn filter(la: &ComplexMatrix<T>, lb: &ComplexMatrix<T>) -> Result<Self> {
        let fa = SuperOperator::conjugation(la)?;
        let fb = SuperOperator::conjugation(lb)?;
        let i = c(T::zero(), T::one());
        let pairs = vec![(fa.clone(), fb.clone()), (fa.scaled(i), fb.scaled(-i))];
        Self::new(pairs, T::one(), T::one())
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(SuperOperator<T>, SuperOperator<T>)] {
        &self.pairs
    }

    pub fn eps(&self) -> (T, T) {
        (self.eps_a, self.eps_b)
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.pairs[0].0.in_dim, self.pairs[0].1.in_dim)
    }

    /// `(E_k^A (x) E_l^B)(x)`.
    pub fn apply_product(&self, k: usize, l: usize, x: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        let n = self.n();
        if k >= n || l >= n {
            return Err(Error::OutOfRange { name: "pair index", value: format!("({k}, {l})"), range: "0..n" });
        }
        apply_product_superop(&self.pairs[k].0, &self.pairs[l].1, x, self.dims())
    }
}

fn check_spec_dims<T: Real>(dims: Dims, ts: &TransformSpec<T>) -> Result<()> {
    if ts.dims() != dims {
        return Err(mismatch("transform spec dims", format!("{dims:?}"), format!("{:?}", ts.dims())));
    }
    Ok(())
}

/// The transformed operator. Generally not a density operator.
pub fn e_transform<T: Real>(s: &BipartiteState<T>, ts: &TransformSpec<T>) -> Result<ComplexMatrix<T>> {
    e_transform_of(s.rho(), s.dims(), ts)
}

pub fn e_transform_of<T: Real>(rho: &ComplexMatrix<T>, dims: Dims, ts: &TransformSpec<T>) -> Result<ComplexMatrix<T>> {
    check_spec_dims(dims, ts)?;
    let n = ts.n();
    let inv_n = T::one() / T::lit(n as f64);
    let nd = dims.total();
    let mut out = ComplexMatrix::zeros(nd, nd);
    for k in 0..n {
        out = &out + &ts.apply_product(k, k, rho)?;
    }
    if n > 1 {
        let product = kron(&partial_trace(rho, dims, Subsystem::A)?, &partial_trace(rho, dims, Subsystem::B)?)?;
        for k in 0..n {
            for l in (0..n).filter(|&l| l != k) {
                out = &out + &ts.apply_product(k, l, &product)?;
            }
        }
    }
    Ok(out.scale_real(inv_n))
}

/// `eps + (1/n) sum_{k<l} 2 Re <E_k(m), E_l(m)>` for one side.
fn radicand<T: Real>(ops: &[&SuperOperator<T>], marginal: &ComplexMatrix<T>, eps: T) -> Result<T> {
    let images = ops.iter().map(|e| e.apply(marginal)).collect::<Result<Vec<_>>>()?;
    let mut cross = T::zero();
    for k in 0..images.len() {
        for l in k + 1..images.len() {
            cross = cross + hs_inner(&images[k], &images[l])?.re * T::lit(2.0);
        }
    }
    Ok(eps + cross / T::lit(ops.len() as f64))
}

fn clamp_radicand<T: Real>(value: T, subsystem: char) -> Result<T> {
    let slack = T::lit(1e-12).max(T::epsilon() * T::lit(100.0));
    if value < -slack {
        return Err(Error::NegativeRadicand { subsystem, value: value.as_f64() });
    }
    Ok(value.max(T::zero()))
}

/// Generic transform criterion: `ccn(T(rho))` against the product of the two
/// radicands' square roots.
pub fn transform_check<T: Real>(s: &BipartiteState<T>, ts: &TransformSpec<T>, tols: &Tolerances<T>) -> Result<CriterionReport<T>> {
    check_spec_dims(s.dims(), ts)?;
    let lhs = ccn(&e_transform(s, ts)?, s.dims())?;
    let ops_a: Vec<_> = ts.pairs.iter().map(|(a, _)| a).collect();
    let ops_b: Vec<_> = ts.pairs.iter().map(|(_, b)| b).collect();
    let rad_a = clamp_radicand(radicand(&ops_a, &s.marginal(Subsystem::A), ts.eps_a)?, 'A')?;
    let rad_b = clamp_radicand(radicand(&ops_b, &s.marginal(Subsystem::B), ts.eps_b)?, 'B')?;
    Ok(CriterionReport::decide("transform", lhs, (rad_a * rad_b).sqrt(), tols.decision)
        .with("n", ts.n())
        .with_real("eps_a", ts.eps_a)
        .with_real("eps_b", ts.eps_b)
        .with_real("radicand_a", rad_a)
        .with_real("radicand_b", rad_b))
}

/// `ccn(rho - cos(theta) rho_A (x) rho_B) <= sqrt((1 - cos(theta) tr rho_A^2)(1 - cos(theta) tr rho_B^2))`.
pub fn theta_check<T: Real>(s: &BipartiteState<T>, theta: T, tols: &Tolerances<T>) -> Result<CriterionReport<T>> {
    if !(theta >= T::zero() && theta <= T::PI()) {
        return Err(Error::OutOfRange { name: "theta", value: theta.to_string(), range: "[0, pi]" });
    }
    let cos = theta.cos();
    let ra = s.marginal(Subsystem::A);
    let rb = s.marginal(Subsystem::B);
    let shifted = s.rho().try_sub(&kron(&ra, &rb)?.scale_real(cos))?;
    let lhs = ccn(&shifted, s.dims())?;
    let purity = |m: &ComplexMatrix<T>| m.as_slice().iter().map(|z| z.norm_sqr()).sum::<T>();
    let bound = ((T::one() - cos * purity(&ra)) * (T::one() - cos * purity(&rb))).max(T::zero()).sqrt();
    Ok(CriterionReport::decide("theta", lhs, bound, tols.decision).with_real("theta", theta))
}

/// Zhang et al.'s criterion `ccn(rho - rho_A (x) rho_B) <= sqrt((1 - tr rho_A^2)(1 - tr rho_B^2))`,
/// the `theta = 0` member of the family.
pub fn zhang_check<T: Real>(s: &BipartiteState<T>, tols: &Tolerances<T>) -> Result<CriterionReport<T>> {
    let mut r = theta_check(s, T::zero(), tols)?;
    r.criterion_id = "zhang".into();
    Ok(r)
}

/// Local-filter criterion `ccn((La (x) Lb) rho (La (x) Lb)^dagger) <= 1` for
/// contractive filters.
///
/// With `normalize`, each filter is divided by its largest singular value.
/// Note that contractive filters can never raise the realigned trace norm, so
/// this check is never stronger than [`rc_check`] on the same state.
pub fn filter_check<T: Real>(
    s: &BipartiteState<T>,
    la: &ComplexMatrix<T>,
    lb: &ComplexMatrix<T>,
    normalize: bool,
    tols: &Tolerances<T>,
) -> Result<CriterionReport<T>> {
    let Dims { na, nb } = s.dims();
    if la.shape() != (na, na) || lb.shape() != (nb, nb) {
        return Err(mismatch("filter shapes", format!("{na}x{na} and {nb}x{nb}"), format!("{:?} and {:?}", la.shape(), lb.shape())));
    }
    let prepare = |l: &ComplexMatrix<T>| -> Result<(ComplexMatrix<T>, T)> {
        let norm = singular_values(l)?[0];
        if normalize {
            if norm <= T::zero() {
                return Err(Error::FilterNotContractive { norm: 0.0 });
            }
            Ok((l.scale_real(T::one() / norm), norm))
        } else if norm > T::one() + T::lit(1e-12) {
            Err(Error::FilterNotContractive { norm: norm.as_f64() })
        } else {
            Ok((l.clone(), norm))
        }
    };
    let (fa, norm_a) = prepare(la)?;
    let (fb, norm_b) = prepare(lb)?;
    let filtered = kron(&fa, &fb)?.sandwich(s.rho())?;
    let lhs = ccn(&filtered, s.dims())?;
    Ok(CriterionReport::decide("filter", lhs, T::one(), tols.decision)
        .with_real("norm_a", norm_a)
        .with_real("norm_b", norm_b)
        .with("normalized", if normalize { "yes" } else { "no" }))
}

/// Empirical lower bound on the `eps` a set of same-side superoperators needs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsEstimate<T: Real> {
    pub value: T,
    pub samples: usize,
    /// Always `false`: sampling cannot certify a supremum over all states.
    pub certified: bool,
}

/// Samples random pure states (the maximizers of the convex functional
/// `||E(sigma)||_HS^2`) and returns `(1/n) sum_k max_sigma ||E_k(sigma)||_HS^2`.
pub fn estimate_eps<T: Real>(ops: &[SuperOperator<T>], samples: usize, seed: Seed) -> Result<EpsEstimate<T>> {
    let Some(first) = ops.first() else {
        return Err(Error::OutOfRange { name: "operators", value: "0".into(), range: ">= 1" });
    };
    let dim = first.in_dim;
    let mut sampler = Sampler::new(seed);
    let mut best = vec![T::zero(); ops.len()];
    for _ in 0..samples.max(1) {
        let v = sampler.pure_vector::<T>(dim);
        let sigma = crate::states::projector(&v);
        for (b, e) in best.iter_mut().zip(ops) {
            let image = e.apply(&sigma)?;
            *b = b.max(image.as_slice().iter().map(|z| z.norm_sqr()).sum());
        }
    }
    let value = best.iter().copied().sum::<T>() / T::lit(ops.len() as f64);
    Ok(EpsEstimate { value, samples: samples.max(1), certified: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::matrix_unit_basis;
    use crate::states::{max_entangled, product_state, random_contraction, random_density, random_matrix, random_separable, werner};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn tols() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn bell() -> BipartiteState<f64> {
        max_entangled(2).unwrap()
    }

    fn random_state(n: (usize, usize), seed: u64) -> BipartiteState<f64> {
        BipartiteState::new(random_density(n.0 * n.1, Seed(seed)), n.0, n.1).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn rc_on_bell_and_products() {
        let r = rc_check(&bell(), &tols()).unwrap();
        assert!(close(r.lhs, 2.0, 1e-12) && r.detected());
        for seed in 0..10 {
            let ra = random_density::<f64>(2, Seed(seed));
            let rb = random_density::<f64>(3, Seed(100 + seed));
            let p = product_state(&ra, &rb).unwrap();
            let r = rc_check(&p, &tols()).unwrap();
            assert!(close(r.lhs, ra.hs_norm() * rb.hs_norm(), 1e-12));
            assert_eq!(r.verdict, Verdict::Inconclusive);
        }
    }

    /// Bisection on the detection predicate of `check` over `werner(p)`.
    fn werner_threshold(check: impl Fn(&BipartiteState<f64>) -> bool) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        assert!(!check(&werner(lo).unwrap()) && check(&werner(hi).unwrap()));
        while hi - lo > 1e-6 {
            let mid = 0.5 * (lo + hi);
            if check(&werner(mid).unwrap()) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn werner_rc_threshold_is_one_third() {
        // realigned Werner spectrum {1/2, p/2, p/2, p/2}: CCN = (1 + 3p)/2 crosses 1 at p = 1/3
        let p = werner_threshold(|s| rc_check(s, &tols()).unwrap().detected());
        assert!(close(p, 1.0 / 3.0, 1e-3), "threshold {p}");
    }

    #[test]
    fn sympoly_cases() {
        let r = sympoly_check(&bell(), 4, false, &tols()).unwrap();
        assert!(close(r.lhs, 1.0 / 16.0, 1e-12));
        assert!(close(r.bound, 1.0 / 256.0, 1e-15));
        assert!(r.detected());

        let mut pure = ComplexMatrix::<f64>::zeros(4, 4);
        pure[(0, 0)] = cr(1.0);
        let p = BipartiteState::new(pure, 2, 2).unwrap();
        for l in 2..=4 {
            for use_rank in [false, true] {
                let r = sympoly_check(&p, l, use_rank, &tols()).unwrap();
                assert!(r.lhs.abs() < 1e-15 && !r.detected());
            }
        }
        assert!(sympoly_check(&bell(), 0, false, &tols()).is_err());
        assert!(sympoly_check(&bell(), 5, false, &tols()).is_err());
    }

    #[test]
    fn sympoly_bounds_are_reported() {
        let s = random_state((2, 2), 3);
        let r = sympoly_check(&s, 2, true, &tols()).unwrap();
        assert_eq!(r.params["rank"], Param::Int(4));
        assert_eq!(r.params["bound_rank_aware"], Param::Real(6.0 / 16.0));
        assert_eq!(r.params["bound_rank_free"], Param::Real(6.0 / 16.0));
        // rank 1 state: l = 2 > R uses bound 0 but stays inconclusive
        let m = BipartiteState::new(ComplexMatrix::<f64>::identity(4).scale_real(0.25), 2, 2).unwrap();
        let r = sympoly_check(&m, 2, true, &tols()).unwrap();
        assert_eq!(r.bound, 0.0);
        assert!(!r.detected());
        assert!(r.params.contains_key("advisory"));
        let r = sympoly_check(&m, 1, true, &tols()).unwrap();
        assert_eq!(r.bound, 1.0);
    }

    #[test]
    fn sympoly_l1_rank_free_matches_rc() {
        for seed in 0..100 {
            let s = random_state((2, 2), 200 + seed);
            let a = rc_check(&s, &tols()).unwrap();
            let b = sympoly_check(&s, 1, false, &tols()).unwrap();
            assert_eq!(a.verdict, b.verdict);
            assert!(close(a.lhs, b.lhs, 1e-12));
        }
    }

    /// Expand `x` over matrix units and map each term: `sum x~ E_A(F_a) (x) E_B(F_alpha)`.
    fn expansion_oracle(ea: &SuperOperator<f64>, eb: &SuperOperator<f64>, x: &ComplexMatrix<f64>, dims: Dims) -> ComplexMatrix<f64> {
        let input = if ea.is_antilinear() { x.conj() } else { x.clone() };
        let ba = matrix_unit_basis::<f64>(dims.na).unwrap();
        let bb = matrix_unit_basis::<f64>(dims.nb).unwrap();
        let n = dims.na * dims.nb;
        let mut out = ComplexMatrix::zeros(n, n);
        let (la, lb) = (
            SuperOperator::new(ea.in_dim(), ea.out_dim(), ea.kernel().clone(), false).unwrap(),
            SuperOperator::new(eb.in_dim(), eb.out_dim(), eb.kernel().clone(), false).unwrap(),
        );
        for fa in &ba.elements {
            for fb in &bb.elements {
                let coeff = hs_inner(&kron(fa, fb).unwrap(), &input).unwrap();
                let term = kron(&la.apply(fa).unwrap(), &lb.apply(fb).unwrap()).unwrap();
                out = &out + &term.scale(coeff);
            }
        }
        out
    }

    #[test]
    fn product_superop_identity_and_conjugation() {
        let x = random_matrix::<f64>(6, 6, Seed(1));
        let d = Dims::new(2, 3);
        let (ia, ib) = (SuperOperator::identity(2), SuperOperator::identity(3));
        assert_eq!(apply_product_superop(&ia, &ib, &x, d).unwrap(), x);
        let (ca, cb) = (ia.into_antilinear(), ib.into_antilinear());
        assert_eq!(apply_product_superop(&ca, &cb, &x, d).unwrap(), x.conj());
        assert!(matches!(
            apply_product_superop(&ca, &SuperOperator::identity(3), &x, d),
            Err(Error::MixedLinearity)
        ));
    }

    #[test]
    fn product_superop_matches_expansion_oracle() {
        for seed in 0..5 {
            let d = Dims::new(2, 3);
            let ea = SuperOperator::new(2, 2, random_matrix(4, 4, Seed(10 + seed)), false).unwrap();
            let eb = SuperOperator::new(3, 3, random_matrix(9, 9, Seed(20 + seed)), false).unwrap();
            let rho = random_density::<f64>(6, Seed(30 + seed));
            let got = apply_product_superop(&ea, &eb, &rho, d).unwrap();
            assert!(got.max_abs_diff(&expansion_oracle(&ea, &eb, &rho, d)).unwrap() < 1e-12);
            let (aa, ab) = (ea.into_antilinear(), eb.into_antilinear());
            let got = apply_product_superop(&aa, &ab, &rho, d).unwrap();
            assert!(got.max_abs_diff(&expansion_oracle(&aa, &ab, &rho, d)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn conjugation_superop_matches_sandwich() {
        let l = random_matrix::<f64>(3, 3, Seed(40));
        let x = random_matrix::<f64>(3, 3, Seed(41));
        let e = SuperOperator::conjugation(&l).unwrap();
        assert!(e.apply(&x).unwrap().max_abs_diff(&l.sandwich(&x).unwrap()).unwrap() < 1e-13);
        let f = SuperOperator::from_linear_map(3, 3, |m| l.sandwich(m).unwrap()).unwrap();
        assert!(f.kernel().max_abs_diff(e.kernel()).unwrap() < 1e-14);
    }

    #[test]
    fn e_transform_identity_returns_state() {
        let s = random_state((2, 3), 50);
        let t = e_transform(&s, &TransformSpec::identity(2, 3)).unwrap();
        assert!(t.max_abs_diff(s.rho()).unwrap() < 1e-15);
    }

    #[test]
    fn e_transform_theta_family_closed_form() {
        for &theta in &[0.0, 0.7, FRAC_PI_2, 2.5, PI] {
            let s = random_state((2, 3), 60);
            let t = e_transform(&s, &TransformSpec::theta(2, 3, theta)).unwrap();
            let prod = kron(&s.marginal(Subsystem::A), &s.marginal(Subsystem::B)).unwrap();
            let want = s.rho() - &prod.scale_real(theta.cos());
            assert!(t.max_abs_diff(&want).unwrap() < 1e-13);
        }
    }

    #[test]
    fn e_transform_filter_cross_terms_cancel() {
        let s = random_state((2, 2), 70);
        let la = random_contraction::<f64>(2, Seed(71));
        let lb = random_contraction::<f64>(2, Seed(72));
        let t = e_transform(&s, &TransformSpec::filter(&la, &lb).unwrap()).unwrap();
        let want = kron(&la, &lb).unwrap().sandwich(s.rho()).unwrap();
        assert!(t.max_abs_diff(&want).unwrap() < 1e-13);
    }

    #[test]
    fn transform_identity_reduces_to_rc() {
        for seed in 0..100 {
            let s = random_state((2, 2), 300 + seed);
            let a = rc_check(&s, &tols()).unwrap();
            let b = transform_check(&s, &TransformSpec::identity(2, 2), &tols()).unwrap();
            assert!(close(a.lhs, b.lhs, 1e-10) && close(a.bound, b.bound, 1e-10));
            assert_eq!(a.verdict, b.verdict);
        }
    }

    #[test]
    fn theta_half_pi_reduces_to_rc() {
        for seed in 0..100 {
            let s = random_state((2, 2), 400 + seed);
            let a = rc_check(&s, &tols()).unwrap();
            let b = theta_check(&s, FRAC_PI_2, &tols()).unwrap();
            assert!(close(a.lhs, b.lhs, 1e-10) && close(a.bound, b.bound, 1e-10));
            assert_eq!(a.verdict, b.verdict);
        }
    }

    #[test]
    fn theta_check_agrees_with_transform_spec() {
        for seed in 0..10 {
            let s = random_state((2, 3), 500 + seed);
            for k in 0..=8 {
                let theta = PI * k as f64 / 8.0;
                let direct = theta_check(&s, theta, &tols()).unwrap();
                let generic = transform_check(&s, &TransformSpec::theta(2, 3, theta), &tols()).unwrap();
                assert!(close(direct.lhs, generic.lhs, 1e-10), "theta {theta}");
                assert!(close(direct.bound, generic.bound, 1e-10), "theta {theta}");
            }
        }
    }

    #[test]
    fn theta_family_on_bell() {
        // realign(rho - I/4) = I/2 - vv^T/4 with v = (1,0,0,1): singular values {1/2,1/2,1/2,0}
        let r = theta_check(&bell(), 0.0, &tols()).unwrap();
        assert!(close(r.lhs, 1.5, 1e-12) && close(r.bound, 0.5, 1e-12) && r.detected());
        // realign(rho + I/4) = I/2 + vv^T/4: singular values {1, 1/2, 1/2, 1/2}
        let r = theta_check(&bell(), PI, &tols()).unwrap();
        assert!(close(r.lhs, 2.5, 1e-12) && close(r.bound, 1.5, 1e-12) && r.detected());
        let r = transform_check(&bell(), &TransformSpec::theta(2, 2, PI), &tols()).unwrap();
        assert!(close(r.lhs, 2.5, 1e-12) && close(r.bound, 1.5, 1e-12) && r.detected());
        assert!(theta_check(&bell(), -0.1, &tols()).is_err());
        assert!(theta_check(&bell(), 3.2, &tols()).is_err());
    }

    #[test]
    fn zhang_cases() {
        let r = zhang_check(&bell(), &tols()).unwrap();
        assert_eq!(r.criterion_id, "zhang");
        assert!(close(r.lhs, 1.5, 1e-12) && close(r.bound, 0.5, 1e-12) && r.detected());
        for seed in 0..20 {
            let ra = random_density::<f64>(2, Seed(600 + seed));
            let rb = random_density::<f64>(2, Seed(700 + seed));
            assert!(!zhang_check(&product_state(&ra, &rb).unwrap(), &tols()).unwrap().detected());
        }
    }

    #[test]
    fn zhang_detects_everything_rc_detects() {
        let mut extra = 0;
        for seed in 0..300 {
            let s = random_state((2, 2), 800 + seed);
            let rc = rc_check(&s, &tols()).unwrap().detected();
            let z = zhang_check(&s, &tols()).unwrap().detected();
            assert!(!rc || z, "seed {seed}");
            extra += (z && !rc) as usize;
        }
        assert!(extra > 0);
    }

    #[test]
    fn filter_cases() {
        let i2 = ComplexMatrix::<f64>::identity(2);
        for seed in 0..10 {
            let s = random_state((2, 2), 900 + seed);
            let a = rc_check(&s, &tols()).unwrap();
            let b = filter_check(&s, &i2, &i2, false, &tols()).unwrap();
            assert!(close(a.lhs, b.lhs, 1e-12));
            assert_eq!(a.verdict, b.verdict);
        }
        let p0 = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let r = filter_check(&bell(), &p0, &p0, false, &tols()).unwrap();
        assert!(close(r.lhs, 0.5, 1e-12) && !r.detected());

        let big = i2.scale_real(2.0);
        assert!(matches!(filter_check(&bell(), &big, &i2, false, &tols()), Err(Error::FilterNotContractive { .. })));
        let r = filter_check(&bell(), &big, &i2, true, &tols()).unwrap();
        assert!(close(r.lhs, 2.0, 1e-12));
    }

    #[test]
    fn contractive_filters_never_exceed_rc() {
        // (La (x) Lb) rho (.)^dagger realigns to (La (x) conj La) R (Lb (x) conj Lb)^T
        for seed in 0..100 {
            let s = random_state((2, 2), 1000 + seed);
            let rc = rc_check(&s, &tols()).unwrap();
            let ma = crate::linalg::hermitian_function(&s.marginal(Subsystem::A), |x| 1.0 / x.sqrt()).unwrap();
            let mb = crate::linalg::hermitian_function(&s.marginal(Subsystem::B), |x| 1.0 / x.sqrt()).unwrap();
            let f = filter_check(&s, &ma, &mb, true, &tols()).unwrap();
            assert!(f.lhs <= rc.lhs + 1e-12);
        }
    }

    #[test]
    fn transform_filter_matches_filter_check() {
        let s = random_state((2, 3), 1100);
        let la = random_contraction::<f64>(2, Seed(1101));
        let lb = random_contraction::<f64>(3, Seed(1102));
        let a = filter_check(&s, &la, &lb, false, &tols()).unwrap();
        let b = transform_check(&s, &TransformSpec::filter(&la, &lb).unwrap(), &tols()).unwrap();
        assert!(close(a.lhs, b.lhs, 1e-10) && close(a.bound, b.bound, 1e-10));
    }

    #[test]
    fn negative_radicand_is_an_error() {
        // E_1 = E_2 = -I with eps = 0: radicand = (1/2) 2 Re<rho_A, rho_A> > 0; flip one sign instead
        let minus = SuperOperator::identity(2).scaled(cr(-1.0));
        let pairs = vec![(SuperOperator::identity(2), SuperOperator::identity(2)), (minus.clone(), minus)];
        let ts = TransformSpec::new(pairs, 0.0, 0.0).unwrap();
        assert!(matches!(transform_check(&bell(), &ts, &tols()), Err(Error::NegativeRadicand { .. })));
    }

    #[test]
    fn spec_validation() {
        let lin = SuperOperator::<f64>::identity(2);
        let anti = SuperOperator::<f64>::identity(2).into_antilinear();
        assert!(matches!(TransformSpec::new(vec![(lin.clone(), anti)], 1.0, 1.0), Err(Error::MixedLinearity)));
        assert!(TransformSpec::new(vec![(lin.clone(), lin.clone())], -1.0, 1.0).is_err());
        assert!(TransformSpec::<f64>::new(vec![], 1.0, 1.0).is_err());
        assert!(TransformSpec::new(vec![(lin.clone(), SuperOperator::identity(3))], 1.0, 1.0).is_ok());
        assert!(SuperOperator::new(2, 2, ComplexMatrix::<f64>::identity(3), false).is_err());
        let ts = TransformSpec::identity(2, 2);
        assert!(e_transform(&random_state((2, 3), 1), &ts).is_err());
        assert!(ts.apply_product(0, 1, &ComplexMatrix::identity(4)).is_err());
    }

    #[test]
    fn antilinear_identity_pair_is_sound_with_eps_one() {
        // X -> conj(X) on both sides is the partial-transpose-free global conjugation;
        // conj(rho) has the same realigned singular values, so the verdict matches RC.
        let pair = (SuperOperator::identity(2).into_antilinear(), SuperOperator::identity(2).into_antilinear());
        let ts = TransformSpec::new(vec![pair], 1.0, 1.0).unwrap();
        for seed in 0..20 {
            let s = random_state((2, 2), 1200 + seed);
            let a = rc_check(&s, &tols()).unwrap();
            let b = transform_check(&s, &ts, &tols()).unwrap();
            assert!(close(a.lhs, b.lhs, 1e-10));
        }
    }

    #[test]
    fn eps_estimates() {
        let id = SuperOperator::<f64>::identity(2);
        let e = estimate_eps(&[id.clone(), id.clone()], 50, Seed(1)).unwrap();
        assert!(close(e.value, 1.0, 1e-12) && !e.certified);
        let half = id.scaled(cr(0.5));
        let e = estimate_eps(&[half], 50, Seed(2)).unwrap();
        assert!(close(e.value, 0.25, 1e-12));
        let l = random_contraction::<f64>(3, Seed(3));
        let e = estimate_eps(&[SuperOperator::conjugation(&l).unwrap()], 200, Seed(4)).unwrap();
        assert!(e.value <= 1.0 + 1e-12 && e.value > 0.0);
    }

    #[test]
    fn soundness_on_random_separable_states() {
        for seed in 0..60 {
            let dims = if seed % 2 == 0 { (2, 2) } else { (2, 3) };
            let s = random_separable::<f64>(dims.0, dims.1, 10, Seed(1300 + seed));
            let t = tols();
            assert!(!rc_check(&s, &t).unwrap().detected());
            assert!(!zhang_check(&s, &t).unwrap().detected());
            for k in 0..=4 {
                assert!(!theta_check(&s, PI * k as f64 / 4.0, &t).unwrap().detected());
            }
            for l in 1..=4 {
                assert!(!sympoly_check(&s, l, false, &t).unwrap().detected());
                assert!(!sympoly_check(&s, l, true, &t).unwrap().detected());
            }
            let la = random_contraction::<f64>(dims.0, Seed(seed));
            let lb = random_contraction::<f64>(dims.1, Seed(seed + 1));
            assert!(!filter_check(&s, &la, &lb, false, &t).unwrap().detected());
        }
    }

    #[test]
    fn single_precision_rc() {
        let b = max_entangled::<f32>(2).unwrap();
        let r = rc_check(&b, &Tolerances::default()).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-5 && r.detected());
    }
}
