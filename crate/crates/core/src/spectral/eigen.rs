//! Eigenvalues of Hermitian matrices: Householder reduction to a real
//! symmetric tridiagonal matrix followed by implicit QL iterations with
//! Wilkinson shifts.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

use crate::ensembles::HermitianMatrix;
use crate::error::{Result, SffError};

/// Sorted real spectrum of one matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Wrap eigenvalues, sorting them ascending. Rejects non-finite input.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return crate::error::invalid("spectrum must be nonempty and finite");
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

trait Field: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    const ZERO: Self;
    fn conj(self) -> Self;
    fn norm_sqr(self) -> f64;
    fn re(self) -> f64;
    fn scale(self, s: f64) -> Self;
    /// Unit-modulus phase of `self`, or one for zero.
    fn phase(self) -> Self;
}

impl Field for f64 {
    const ZERO: Self = 0.0;
    fn conj(self) -> Self {
        self
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn re(self) -> f64 {
        self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn phase(self) -> Self {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

impl Field for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn phase(self) -> Self {
        let r = self.norm();
        if r == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            self / r
        }
    }
}

/// Reduce the dense Hermitian `a` (row-major, both triangles) to a real
/// symmetric tridiagonal matrix with diagonal `d` and off-diagonal `e`
/// (`e[i]` couples `i` and `i + 1`).
///
/// Each step applies the Hermitian reflector `P = I - 2 u u*` to the trailing
/// block as `A - 2 (u w* + w u*)` with `p = A u`, `w = p - (u* p) u`. The
/// resulting off-diagonal entries may be complex; a diagonal unitary
/// similarity replaces them by their moduli.
fn tridiagonalize<T: Field>(a: &mut [T], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut u = vec![T::ZERO; n];
    let mut w = vec![T::ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let col_norm_sq: f64 = (lo..n).map(|i| a[i * n + k].norm_sqr()).sum();
        let x0 = a[lo * n + k];
        let tail_sq = col_norm_sq - x0.norm_sqr();
        if tail_sq <= f64::MIN_POSITIVE * col_norm_sq.max(f64::MIN_POSITIVE) || tail_sq <= 0.0 {
            continue; // already in tridiagonal form in this column
        }
        let alpha = col_norm_sq.sqrt();
        let ph = x0.phase();
        // u = x + ph * alpha e_1, normalised
        for i in lo..n {
            u[i] = a[i * n + k];
        }
        u[lo] = u[lo] + ph.scale(alpha);
        let u_norm = (lo..n).map(|i| u[i].norm_sqr()).sum::<f64>().sqrt();
        let inv = 1.0 / u_norm;
        for ui in u.iter_mut().take(n).skip(lo) {
            *ui = ui.scale(inv);
        }
        // p = A u over the trailing block, also covering column k
        let mut kk = 0.0;
        for i in k..n {
            let row = &a[i * n..i * n + n];
            let mut s = T::ZERO;
            for j in lo..n {
                s = s + row[j] * u[j];
            }
            w[i] = s;
            if i >= lo {
                kk += (u[i].conj() * s).re();
            }
        }
        for i in lo..n {
            w[i] = w[i] - u[i].scale(kk);
        }
        // column k and row k: (P A)_{ik} for i >= lo equals -ph*alpha e_1
        for i in lo..n {
            a[i * n + k] = T::ZERO;
            a[k * n + i] = T::ZERO;
        }
        let beta = ph.scale(-alpha);
        a[lo * n + k] = beta;
        a[k * n + lo] = beta.conj();
        for i in lo..n {
            let (ui, wi) = (u[i], w[i]);
            let row = &mut a[i * n..i * n + n];
            for j in lo..n {
                let upd = ui * w[j].conj() + wi * u[j].conj();
                row[j] = row[j] - upd.scale(2.0);
            }
        }
    }
    for i in 0..n {
        d[i] = a[i * n + i].re();
        if i + 1 < n {
            e[i] = a[(i + 1) * n + i].norm_sqr().sqrt();
        }
    }
    (d, e)
}

const MAX_QL_SWEEPS: usize = 60;

/// Eigenvalues of the symmetric tridiagonal matrix `(d, e)` by implicit QL
/// with Wilkinson shifts; `e[n-1]` is ignored. Returns `false` on
/// non-convergence.
pub(crate) fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> bool {
    let n = d.len();
    if n == 0 {
        return true;
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m] == 0.0 {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return false;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    true
}

/// Tridiagonal form `(diagonal, off-diagonal moduli)` of a Hermitian matrix.
pub fn tridiagonal_form(h: &HermitianMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = h.n();
    if h.is_complex() {
        let mut a = h.to_dense();
        tridiagonalize(&mut a, n)
    } else {
        let mut a: Vec<f64> = h.to_dense().into_iter().map(|z| z.re).collect();
        tridiagonalize(&mut a, n)
    }
}

/// All eigenvalues of `h`, ascending.
pub fn eigenvalues(h: &HermitianMatrix) -> Result<Spectrum> {
    let (mut d, mut e) = tridiagonal_form(h);
    if !tridiagonal_ql(&mut d, &mut e) {
        return Err(SffError::NonConvergence { what: "implicit QL eigenvalue iteration".into(), achieved: f64::NAN });
    }
    Spectrum::new(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_wigner, tags, EnsembleSpec, EntryLaw, StreamId};

    /// Number of eigenvalues below `sigma` from the inertia of `A - sigma I`
    /// by unpivoted LDL* elimination (adequate for small matrices; a tiny
    /// value replaces exact zero pivots).
    fn count_below(a: &[Complex64], n: usize, sigma: f64) -> usize {
        let mut m = a.to_vec();
        for i in 0..n {
            m[i * n + i] -= sigma;
        }
        let mut neg = 0;
        for k in 0..n {
            let mut piv = m[k * n + k].re;
            if piv == 0.0 {
                piv = 1e-300;
            }
            if piv < 0.0 {
                neg += 1;
            }
            for i in k + 1..n {
                let l = m[i * n + k] / piv;
                for j in k + 1..n {
                    let upd = l * m[k * n + j];
                    m[i * n + j] -= upd;
                }
            }
        }
        neg
    }

    fn bisection_oracle(h: &HermitianMatrix) -> Vec<f64> {
        let n = h.n();
        let a = h.to_dense();
        let bound = h.frobenius_norm() + 1.0;
        (0..n)
            .map(|k| {
                let (mut lo, mut hi) = (-bound, bound);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if count_below(&a, n, mid) > k {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }

    /// `min ||(H - lambda) v||` over unit `v`, via a few inverse iterations.
    fn residual(h: &HermitianMatrix, lambda: f64) -> f64 {
        let n = h.n();
        let a = h.to_dense();
        let shift = lambda + 1e-10 * (1.0 + lambda.abs());
        let mut v: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + 0.1 * i as f64, 0.3)).collect();
        for _ in 0..3 {
            // solve (A - shift) x = v with Gaussian elimination and partial pivoting
            let mut m: Vec<Complex64> = a.clone();
            for i in 0..n {
                m[i * n + i] -= shift;
            }
            let mut b = v.clone();
            for k in 0..n {
                let p = (k..n).max_by(|&x, &y| m[x * n + k].norm().total_cmp(&m[y * n + k].norm())).unwrap();
                if p != k {
                    for j in 0..n {
                        m.swap(k * n + j, p * n + j);
                    }
                    b.swap(k, p);
                }
                for i in k + 1..n {
                    let l = m[i * n + k] / m[k * n + k];
                    for j in k..n {
                        let upd = l * m[k * n + j];
                        m[i * n + j] -= upd;
                    }
                    let upd = l * b[k];
                    b[i] -= upd;
                }
            }
            for k in (0..n).rev() {
                let mut s = b[k];
                for j in k + 1..n {
                    s -= m[k * n + j] * b[j];
                }
                b[k] = s / m[k * n + k];
            }
            let norm = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v = b.into_iter().map(|z| z / norm).collect();
        }
        (0..n)
            .map(|i| {
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    s += a[i * n + j] * v[j];
                }
                (s - v[i] * lambda).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn diagonal_input() {
        let h = HermitianMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]);
        assert_eq!(eigenvalues(&h).unwrap().values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_swap() {
        let h = HermitianMatrix::from_lower(2, false, |i, j| Complex64::new(if i == j { 0.0 } else { 1.0 }, 0.0));
        let s = eigenvalues(&h).unwrap();
        assert!((s.values()[0] + 1.0).abs() < 1e-15 && (s.values()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn complex_two_by_two() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2
        let h = HermitianMatrix::from_lower(2, true, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, -1.0)
            }
        });
        let s = eigenvalues(&h).unwrap();
        assert!(s.values()[0].abs() < 1e-15 && (s.values()[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn goe_matches_bisection_oracle() {
        let spec = EnsembleSpec::new(8, EntryLaw::goe(), 17).unwrap();
        let h = sample_wigner(&spec, StreamId::new(tags::WIGNER, 0));
        let got = eigenvalues(&h).unwrap();
        for (a, b) in got.values().iter().zip(bisection_oracle(&h)) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn gue_matches_bisection_oracle() {
        for (n, seed) in [(5, 1), (12, 2)] {
            let spec = EnsembleSpec::new(n, EntryLaw::gue(), seed).unwrap();
            let h = sample_wigner(&spec, StreamId::new(tags::WIGNER, 0));
            let got = eigenvalues(&h).unwrap();
            for (a, b) in got.values().iter().zip(bisection_oracle(&h)) {
                assert!((a - b).abs() < 1e-8, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn residuals_and_trace_up_to_64() {
        for (n, seed, law) in [(16, 2, EntryLaw::gue()), (33, 3, EntryLaw::goe()), (64, 4, EntryLaw::gue())] {
            let spec = EnsembleSpec::new(n, law, seed).unwrap();
            let h = sample_wigner(&spec, StreamId::new(tags::WIGNER, 0));
            let got = eigenvalues(&h).unwrap();
            let norm = h.frobenius_norm();
            for &lam in got.values() {
                assert!(residual(&h, lam) <= 1e-9 * norm, "n={n}");
            }
            let sum: f64 = got.values().iter().sum();
            assert!((sum - h.trace()).abs() <= 1e-9 * n as f64 * norm);
        }
    }

    #[test]
    fn repeated_eigenvalues() {
        let h = HermitianMatrix::from_real_diagonal(&[2.0, 2.0, 2.0, -1.0]);
        assert_eq!(eigenvalues(&h).unwrap().values(), &[-1.0, 2.0, 2.0, 2.0]);
        // J - I for the all-ones J: eigenvalues -1 (x3) and 3
        let h = HermitianMatrix::from_lower(4, false, |i, j| Complex64::new(if i == j { 0.0 } else { 1.0 }, 0.0));
        let s = eigenvalues(&h).unwrap();
        for (a, b) in s.values().iter().zip([-1.0, -1.0, -1.0, 3.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn spectral_radius_sanity() {
        let spec = EnsembleSpec::new(60, EntryLaw::gue(), 9).unwrap();
        for i in 0..5 {
            let s = eigenvalues(&sample_wigner(&spec, StreamId::new(tags::WIGNER, i))).unwrap();
            assert!(s.values().iter().all(|v| v.abs() <= 2.5));
        }
    }
}
