//! Jacobi-type decompositions: one-sided (Hestenes) SVD and the cyclic
//! Hermitian eigensolver. Both work on any `Real` scalar and are accurate to a
//! few ulps at the matrix sizes this crate deals with (a few hundred rows).

use num_complex::Complex;
use num_traits::Zero;

use super::ComplexMatrix;
use crate::error::{mismatch, Error, Result};
use crate::scalar::{cr, Real};

const MAX_SWEEPS: usize = 100;

/// Thin SVD `a = u * diag(singular_values) * v^dagger`.
///
/// With `k = min(rows, cols)`: `u` is `rows x k`, `v` is `cols x k`, both with
/// orthonormal columns, and `singular_values` is non-increasing. Columns of
/// `u`/`v` paired with zero singular values are completed to an orthonormal set.
#[derive(Debug, Clone)]
pub struct Svd<T: Real> {
    pub u: ComplexMatrix<T>,
    pub singular_values: Vec<T>,
    pub v: ComplexMatrix<T>,
}

pub fn svd<T: Real>(a: &ComplexMatrix<T>) -> Result<Svd<T>> {
    if a.rows() < a.cols() {
        let Svd { u, singular_values, v } = svd(&a.adjoint())?;
        return Ok(Svd { u: v, singular_values, v: u });
    }
    let (m, n) = a.shape();
    let mut cols: Vec<Vec<Complex<T>>> = (0..n).map(|j| a.column(j)).collect();
    let mut vcols: Vec<Vec<Complex<T>>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { cr(T::one()) } else { Complex::zero() }).collect())
        .collect();

    let eps = T::epsilon() * T::lit(m as f64).sqrt().max(T::one());
    // columns below this squared norm are roundoff; rotating them never settles
    let frob2: T = cols.iter().flatten().map(|z| z.norm_sqr()).sum();
    let negligible = frob2 * T::epsilon() * T::epsilon();
    let mut converged = false;
    let mut residual = T::zero();
    for _ in 0..MAX_SWEEPS {
        residual = T::zero();
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: T = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: T = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex<T> = cols[p].iter().zip(&cols[q]).fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * y);
                let g = gamma.norm();
                let scale = alpha.sqrt() * beta.sqrt();
                if g.is_zero() || g <= eps * scale || alpha.min(beta) <= negligible {
                    continue;
                }
                rotated = true;
                residual = residual.max(g / scale);
                let unphase = (gamma / g).conj();
                let zeta = (beta - alpha) / (g + g);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(T::one()));
                let c = T::one() / t.hypot(T::one());
                let s = c * t;
                rotate(&mut cols, p, q, unphase, c, s);
                rotate(&mut vcols, p, q, unphase, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { routine: "svd", sweeps: MAX_SWEEPS, residual: residual.as_f64() });
    }

    let norms: Vec<T> = cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));

    let smax = norms[order[0]];
    let null_cut = smax * T::epsilon() * T::lit(10.0 * m as f64);
    let mut ucols: Vec<Option<Vec<Complex<T>>>> = order
        .iter()
        .map(|&j| {
            let s = norms[j];
            (s > null_cut && s > T::min_positive_value()).then(|| cols[j].iter().map(|z| z / s).collect())
        })
        .collect();
    complete_orthonormal(&mut ucols, m);

    let u = ComplexMatrix::from_fn(m, n, |i, k| ucols[k].as_ref().expect("completed")[i]);
    let v = ComplexMatrix::from_fn(n, n, |i, k| vcols[order[k]][i]);
    Ok(Svd { u, singular_values: order.iter().map(|&j| norms[j]).collect(), v })
}

fn rotate<T: Real>(cols: &mut [Vec<Complex<T>>], p: usize, q: usize, unphase: Complex<T>, c: T, s: T) {
    let (left, right) = cols.split_at_mut(q);
    for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
        let ap = *x;
        let bq = *y * unphase;
        *x = ap * c - bq * s;
        *y = ap * s + bq * c;
    }
}

/// Fills `None` slots with unit vectors orthogonal to every other slot, via
/// Gram-Schmidt on the standard basis.
fn complete_orthonormal<T: Real>(slots: &mut [Option<Vec<Complex<T>>>], dim: usize) {
    let mut candidate = 0;
    for k in 0..slots.len() {
        if slots[k].is_some() {
            continue;
        }
        while candidate < dim {
            let mut w: Vec<Complex<T>> = (0..dim).map(|i| if i == candidate { cr(T::one()) } else { Complex::zero() }).collect();
            candidate += 1;
            // two passes of modified Gram-Schmidt for numerical orthogonality
            for _ in 0..2 {
                for q in slots.iter().flatten() {
                    let proj = q.iter().zip(&w).fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b);
                    for (wi, qi) in w.iter_mut().zip(q) {
                        *wi = *wi - qi * proj;
                    }
                }
            }
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if norm > T::lit(0.25) {
                slots[k] = Some(w.into_iter().map(|z| z / norm).collect());
                break;
            }
        }
    }
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending, eigenvectors
/// as the matching columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

/// Cyclic complex Jacobi. Only the Hermitian part of `h` is used.
pub fn hermitian_eigen<T: Real>(h: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    if !h.is_square() {
        return Err(mismatch("hermitian_eigen", "square matrix", format!("{}x{}", h.rows(), h.cols())));
    }
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::<T>::identity(n);
    let threshold = T::epsilon() * a.hs_norm() * T::lit(0.5);

    let mut converged = false;
    let mut residual = T::zero();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        residual = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                let hpq = a[(p, q)];
                let g = hpq.norm();
                if g <= threshold || g.is_zero() {
                    continue;
                }
                rotated = true;
                residual = residual.max(g);
                let unphase = (hpq / g).conj();
                let (ap, aq) = (a[(p, p)].re, a[(q, q)].re);
                let zeta = (aq - ap) / (g + g);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(T::one()));
                let c = T::one() / t.hypot(T::one());
                let s = c * t;
                // block of G = diag(1, e^{-i phi}) * [[c, s], [-s, c]]
                let gpp = cr(c);
                let gpq = cr(s);
                let gqp = unphase * (-s);
                let gqq = unphase * c;
                for k in 0..n {
                    let (x, y) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = x * gpp + y * gqp;
                    a[(k, q)] = x * gpq + y * gqq;
                }
                for k in 0..n {
                    let (x, y) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = gpp.conj() * x + gqp.conj() * y;
                    a[(q, k)] = gpq.conj() * x + gqq.conj() * y;
                }
                for k in 0..n {
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x * gpp + y * gqp;
                    v[(k, q)] = x * gpq + y * gqq;
                }
                a[(p, q)] = Complex::zero();
                a[(q, p)] = Complex::zero();
                a[(p, p)] = cr(a[(p, p)].re);
                a[(q, q)] = cr(a[(q, q)].re);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { routine: "hermitian_eigen", sweeps: MAX_SWEEPS, residual: residual.as_f64() });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    Ok(HermitianEigen {
        values: order.iter().map(|&i| a[(i, i)].re).collect(),
        vectors: ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]),
    })
}

/// `f(h)` for Hermitian `h`, through its eigen-decomposition.
pub fn hermitian_function<T: Real>(h: &ComplexMatrix<T>, f: impl Fn(T) -> T) -> Result<ComplexMatrix<T>> {
    let HermitianEigen { values, vectors } = hermitian_eigen(h)?;
    let n = values.len();
    let fv: Vec<T> = values.iter().map(|&x| f(x)).collect();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n).fold(Complex::zero(), |acc, k| acc + vectors[(i, k)] * vectors[(j, k)].conj() * fv[k])
    }))
}
