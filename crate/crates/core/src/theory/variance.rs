//! Covariance functions `v_±(t)` of the rescaled traces `tr e^{itH^s}` and
//! `tr e^{∓itH^r}` for two normalized parameter points with overlap `U`.
//!
//! Expanding the kernel in Chebyshev form gives the series
//! `v_±(t, U) = (2/β) sum_k (±1)^k k U^k J_k(2t)^2`, which is the fast path.
//! The direct double integral of the kernel is kept as its oracle.

use std::f64::consts::PI;

use crate::ensembles::Beta;
use crate::error::{invalid, Result, SffError};
use crate::scalar_math::{bessel_j012, bessel_j_all, log_kernel_v_angle, series_truncation, Adaptive, Estimate};

/// Which of the two covariances: `+` pairs `e^{itH^s}` with `e^{itH^r}`,
/// `-` pairs it with the complex conjugate `e^{-itH^r}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PmSign {
    Plus,
    Minus,
}

/// Largest time accepted by [`v_pm_quadrature`].
pub const QUADRATURE_MAX_T: f64 = 50.0;

/// The coefficients `k J_k(2t)^2`, `k = 1..=K(t)`, of the covariance series
/// at one time, reusable for any overlap and sign.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselSquares {
    t: f64,
    coeffs: Vec<f64>,
}

impl BesselSquares {
    pub fn new(t: f64) -> Self {
        let kmax = series_truncation(t);
        let j = bessel_j_all(kmax, 2.0 * t);
        let coeffs = (1..=kmax).map(|k| k as f64 * j[k] * j[k]).collect();
        Self { t, coeffs }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Number of series terms.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `sum_k k x^k J_k(2t)^2` by Horner's rule.
    pub fn power_sum(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc * x
    }

    /// `v_±(t, U)` with the overall factor `2/β`.
    pub fn eval(&self, u: f64, sign: PmSign, beta: Beta) -> f64 {
        let x = match sign {
            PmSign::Minus => u,
            PmSign::Plus => -u,
        };
        beta_factor(beta) * self.power_sum(x)
    }
}

pub(crate) fn beta_factor(beta: Beta) -> f64 {
    2.0 / beta.value()
}

/// `v_±(t, U)` from the Bessel series truncated at `K(t)` terms.
pub fn v_pm_series(t: f64, u: f64, sign: PmSign, beta: Beta) -> f64 {
    BesselSquares::new(t).eval(u, sign, beta)
}

/// Closed forms at `U = 1`:
/// `v_- = (2/β) t^2 [J_0^2 + 2 J_1^2 - J_0 J_2]` and `v_+ = -(2/β) t J_0 J_1`,
/// all Bessel functions taken at `2t`.
pub fn v_ss_closed(t: f64, sign: PmSign, beta: Beta) -> f64 {
    let [j0, j1, j2] = bessel_j012(2.0 * t);
    let v = match sign {
        PmSign::Minus => t * t * (j0 * j0 + 2.0 * j1 * j1 - j0 * j2),
        PmSign::Plus => -t * j0 * j1,
    };
    beta_factor(beta) * v
}

/// `v_±(t, U)` by direct adaptive integration of
/// `±(t^2/βπ^2) ∬ cos(t(x ∓ y)) V(U, x, y) dx dy` over `[-2, 2]^2`, carried
/// out in the angles `x = 2cos(θ)`, `y = 2cos(φ)`.
///
/// The inner integral is split where the kernel is singular, at `φ = θ` and
/// `φ = π - θ`. The relative error target is `1e-6`; slow oscillation limits
/// the rule to `t <= 50`.
pub fn v_pm_quadrature(t: f64, u: f64, sign: PmSign, beta: Beta) -> Result<Estimate> {
    if !(t >= 0.0 && t <= QUADRATURE_MAX_T) {
        return invalid(format!("quadrature covariance needs 0 <= t <= {QUADRATURE_MAX_T}, got {t}"));
    }
    if !(u.abs() <= 1.0) {
        return invalid(format!("overlap must lie in [-1, 1], got {u}"));
    }
    if u == 0.0 || t == 0.0 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let segments = 400 + (40.0 * t) as usize;
    let inner_rule = Adaptive::new(1e-13, 1e-9).with_max_segments(segments);
    let outer_rule = Adaptive::new(1e-12, 1e-7).with_max_segments(segments);
    let (sx, phase_sign) = match sign {
        PmSign::Minus => (1.0, -1.0),
        PmSign::Plus => (-1.0, 1.0),
    };
    let mut failure: Option<SffError> = None;
    let outer = outer_rule.integrate(
        |theta| {
            if failure.is_some() {
                return 0.0;
            }
            let x = 2.0 * theta.cos();
            let (st, _) = theta.sin_cos();
            let (lo, hi) = if theta < 0.5 * PI { (theta, PI - theta) } else { (PI - theta, theta) };
            let mut bps = vec![0.0];
            for b in [lo, hi] {
                if b > *bps.last().unwrap() && b < PI {
                    bps.push(b);
                }
            }
            bps.push(PI);
            let inner = inner_rule.integrate(
                |phi| {
                    let y = 2.0 * phi.cos();
                    2.0 * phi.sin() * (t * (x + phase_sign * y)).cos() * log_kernel_v_angle(u, theta, phi)
                },
                &bps,
            );
            match inner {
                Ok(e) => 2.0 * st * e.value,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        &[0.0, 0.5 * PI, PI],
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let outer = outer.map_err(|e| match e {
        SffError::NonConvergence { achieved, .. } => {
            SffError::NonConvergence { what: format!("covariance quadrature at t={t}, U={u}"), achieved }
        }
        other => other,
    })?;
    let scale = sx * t * t / (beta.value() * PI * PI);
    Ok(Estimate { value: scale * outer.value, error: scale.abs() * outer.error })
}
