//! The logarithmic covariance kernel of linear eigenvalue statistics for a
//! pair of parameter points with overlap `U`.
//!
//! With `m(x)` the upper boundary value of the semicircle Stieltjes transform,
//!
//! ```text
//! V(U, x, y) = ln|1 - U m(x) m(y)| - ln|1 - U m(x) conj(m(y))|
//! ```
//!
//! In the angles `x = 2cos(theta)`, `y = 2cos(phi)` this is
//! `sum_k (2 U^k / k) sin(k theta) sin(k phi)`, the form every series in
//! [`crate::theory`] is built from.

use std::f64::consts::PI;

use super::quadrature::{gauss_chebyshev, Adaptive};
use crate::error::{invalid, Result, SffError};

/// `sqrt(4 - x^2)` without cancellation near the edges.
fn edge_root(x: f64) -> f64 {
    ((2.0 - x) * (2.0 + x)).max(0.0).sqrt()
}

/// `|1 - U m(x) conj(m(y))|^2` written through `b = (x - y)/2` and
/// `d = (sqrt(4-x^2) + sqrt(4-y^2))/2`, which avoids the cancellation of the
/// direct complex form near the diagonal.
fn mod_sq_conj(u: f64, b: f64, d: f64) -> f64 {
    let r = b * b + d * d;
    if r == 0.0 {
        return (1.0 - u) * (1.0 - u);
    }
    let re = 1.0 - u + u * 2.0 * b * b / r;
    let im = 2.0 * u * b * d / r;
    re * re + im * im
}

/// The kernel `V(U, x, y)` for `x, y` in `(-2, 2)`.
///
/// Returns `+inf` at the singular point `U = 1`, `x = y` and `-inf` at its
/// mirror image `U = -1`, `x = -y`. The value is symmetric in `x` and `y`
/// bit for bit.
pub fn log_kernel_v(u: f64, x: f64, y: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    let d = 0.5 * (edge_root(x) + edge_root(y));
    let minus = mod_sq_conj(u, 0.5 * (x - y), d);
    // m(x) m(y) = -m(x) conj(m(-y))
    let plus = mod_sq_conj(-u, 0.5 * (x + y), d);
    if minus == 0.0 {
        return f64::INFINITY;
    }
    if plus == 0.0 {
        return f64::NEG_INFINITY;
    }
    0.5 * (plus / minus).ln()
}

/// The kernel in angular variables, `x = 2cos(theta)`, `y = 2cos(phi)`.
pub fn log_kernel_v_angle(u: f64, theta: f64, phi: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    // 1 - 2U cos(a) + U^2 in a form free of cancellation near a = 0 (U > 0)
    // or a = pi (U < 0)
    let q = |a: f64| {
        if u >= 0.0 {
            let s = (0.5 * a).sin();
            (1.0 - u) * (1.0 - u) + 4.0 * u * s * s
        } else {
            let c = (0.5 * a).cos();
            (1.0 + u) * (1.0 + u) - 4.0 * u * c * c
        }
    };
    let minus = q(theta - phi);
    let plus = q(theta + phi);
    if minus == 0.0 {
        return f64::INFINITY;
    }
    if plus == 0.0 {
        return f64::NEG_INFINITY;
    }
    0.5 * (plus / minus).ln()
}

fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn poly_derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(j, &a)| j as f64 * a).collect()
}

/// Exact divided difference `(p(x) - p(y)) / (x - y)` of a polynomial,
/// evaluated as `sum_n c_n h_{n-1}(x, y)` with complete homogeneous sums.
fn divided_difference(c: &[f64], x: f64, y: f64) -> f64 {
    let mut h = 0.0; // h_{n-1}(x, y)
    let mut y_pow = 1.0; // y^{n-1}
    let mut total = 0.0;
    for &a in c.iter().skip(1) {
        h = x * h + y_pow;
        y_pow *= y;
        total += a * h;
    }
    total
}

const MAX_IDENTITY_DEGREE: usize = 12;

/// Residual of the integration-by-parts identity between the log-kernel form
/// and the divided-difference form of the covariance of two polynomial
/// statistics `f`, `g` (coefficients in ascending powers):
///
/// ```text
/// (1/2pi^2) int int f'(x) g'(y) V(1, x, y) dx dy
///   = (1/4pi^2) int int Df Dg (4 - xy) / (sqrt(4-x^2) sqrt(4-y^2)) dx dy
/// ```
///
/// The right side is evaluated exactly by a product Gauss–Chebyshev rule of
/// size `quad_points`. The left side is integrated adaptively in angles with
/// the log singularity at `phi = theta` placed on a breakpoint.
pub fn kernel_identity_residual(f_coeffs: &[f64], g_coeffs: &[f64], quad_points: usize) -> Result<f64> {
    let deg = f_coeffs.len().max(g_coeffs.len()).saturating_sub(1);
    if deg > MAX_IDENTITY_DEGREE {
        return invalid(format!("polynomial degree {deg} exceeds {MAX_IDENTITY_DEGREE}"));
    }
    if quad_points < 200 {
        return invalid(format!("quad_points = {quad_points} must be at least 200"));
    }
    if f_coeffs.iter().chain(g_coeffs).any(|v| !v.is_finite()) {
        return invalid("polynomial coefficients must be finite");
    }

    let rhs = |n: usize| {
        let rule = gauss_chebyshev(n);
        let mut total = 0.0;
        for &x in &rule.nodes {
            let (x, w) = (2.0 * x, PI / n as f64);
            let inner: f64 = rule
                .nodes
                .iter()
                .map(|&y| {
                    let y = 2.0 * y;
                    divided_difference(f_coeffs, x, y) * divided_difference(g_coeffs, y, x) * (4.0 - x * y)
                })
                .sum();
            total += w * w * inner;
        }
        // dx / sqrt(4 - x^2) is the Chebyshev weight on [-2, 2]
        total / (4.0 * PI * PI)
    };
    let rhs_n = rhs(quad_points);
    let rhs_2n = rhs(2 * quad_points);
    if (rhs_n - rhs_2n).abs() > 1e-4 {
        return Err(SffError::NonConvergence {
            what: "divided-difference side of the kernel identity".into(),
            achieved: (rhs_n - rhs_2n).abs(),
        });
    }

    let df = poly_derivative(f_coeffs);
    let dg = poly_derivative(g_coeffs);
    if df.iter().all(|&a| a == 0.0) || dg.iter().all(|&a| a == 0.0) {
        return Ok(rhs_2n.abs());
    }
    let inner_q = Adaptive::new(1e-13, 1e-11).with_max_segments(400);
    let outer_q = Adaptive::new(1e-12, 1e-10).with_max_segments(400);
    let mut inner_err: Option<SffError> = None;
    let lhs = outer_q.integrate(
        |theta: f64| {
            let jac_x = 2.0 * theta.sin();
            let fx = poly_eval(&df, 2.0 * theta.cos()) * jac_x;
            let integrand = |phi: f64| {
                let jac_y = 2.0 * phi.sin();
                poly_eval(&dg, 2.0 * phi.cos()) * jac_y * log_kernel_v_angle(1.0, theta, phi)
            };
            let mut breaks = vec![0.0, theta, PI];
            let mirror = PI - theta;
            if mirror > theta {
                breaks.insert(2, mirror);
            } else if mirror < theta && mirror > 0.0 {
                breaks.insert(1, mirror);
            }
            breaks.dedup();
            match inner_q.integrate(integrand, &breaks) {
                Ok(e) => fx * e.value,
                Err(e) => {
                    inner_err.get_or_insert(e);
                    0.0
                }
            }
        },
        &[0.0, 0.5 * PI, PI],
    )?;
    if let Some(e) = inner_err {
        return Err(e);
    }
    if lhs.error > 1e-4 {
        return Err(SffError::NonConvergence {
            what: "log-kernel side of the kernel identity".into(),
            achieved: lhs.error,
        });
    }
    Ok((lhs.value / (2.0 * PI * PI) - rhs_2n).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn m_boundary(x: f64) -> Complex64 {
        Complex64::new(-0.5 * x, 0.5 * (4.0 - x * x).sqrt())
    }

    fn direct(u: f64, x: f64, y: f64) -> f64 {
        let (mx, my) = (m_boundary(x), m_boundary(y));
        (Complex64::new(1.0, 0.0) - u * mx * my).norm().ln()
            - (Complex64::new(1.0, 0.0) - u * mx * my.conj()).norm().ln()
    }

    #[test]
    fn vanishes_at_zero_overlap() {
        assert_eq!(log_kernel_v(0.0, 0.4, -1.3), 0.0);
        assert_eq!(log_kernel_v_angle(0.0, 0.4, 1.3), 0.0);
    }

    #[test]
    fn matches_direct_complex_evaluation() {
        let v = log_kernel_v(0.5, 0.1, -0.2);
        assert!((v - direct(0.5, 0.1, -0.2)).abs() < 1e-13);
        for &(u, x, y) in &[(0.9, 1.5, -1.9), (-0.3, 0.0, 1.0), (0.99, -1.2, -1.1), (-0.8, 1.7, -1.65)] {
            assert!((log_kernel_v(u, x, y) - direct(u, x, y)).abs() < 1e-13);
        }
    }

    #[test]
    fn angular_form_agrees() {
        for &(u, th, ph) in &[(0.5, 0.3, 2.0), (-0.7, 1.1, 0.2), (0.999, 1.0, 1.001), (-0.95, 0.4, 2.7)] {
            let v = log_kernel_v(u, 2.0 * f64::cos(th), 2.0 * f64::cos(ph));
            assert!((v - log_kernel_v_angle(u, th, ph)).abs() < 1e-12);
        }
    }

    #[test]
    fn chebyshev_series_agrees() {
        let (u, th, ph) = (0.6_f64, 0.9_f64, 2.2_f64);
        let series: f64 =
            (1..200).map(|k| 2.0 * u.powi(k) / k as f64 * (k as f64 * th).sin() * (k as f64 * ph).sin()).sum();
        assert!((series - log_kernel_v_angle(u, th, ph)).abs() < 1e-14);
    }

    #[test]
    fn singular_corner_is_sentinel() {
        assert_eq!(log_kernel_v(1.0, 0.3, 0.3), f64::INFINITY);
        assert_eq!(log_kernel_v(-1.0, 0.3, -0.3), f64::NEG_INFINITY);
    }

    #[test]
    fn lower_bound_near_diagonal() {
        // |1 - U m conj(m)|^2 is at least of order (1-U)^2 + (x-y)^2, so V stays
        // large but finite as the corner is approached.
        let v = log_kernel_v(1.0 - 1e-8, 0.3, 0.3 + 1e-8);
        assert!(v.is_finite() && v > 15.0);
        let bound = -0.5 * ((1e-8f64).powi(2) + (1e-8f64).powi(2)).ln() + 0.5 * (4.0f64).ln();
        assert!(v <= bound + 1.0);
    }

    #[test]
    fn symmetric_in_arguments() {
        for &(u, x, y) in &[(0.5, 0.1, -0.2), (1.0, 1.2, 1.2000001), (-0.4, -1.99, 0.7)] {
            assert_eq!(log_kernel_v(u, x, y), log_kernel_v(u, y, x));
        }
    }

    #[test]
    fn antisymmetric_under_reflection() {
        for &(u, x, y) in &[(0.5, 0.1, -0.2), (0.8, -1.3, 1.7)] {
            assert!((log_kernel_v(u, x, y) + log_kernel_v(-u, x, -y)).abs() < 1e-13);
        }
    }

    #[test]
    fn divided_difference_is_exact() {
        let c = [0.5, -1.0, 2.0, 0.25];
        let (x, y) = (0.7, -1.3);
        let dd = (poly_eval(&c, x) - poly_eval(&c, y)) / (x - y);
        assert!((divided_difference(&c, x, y) - dd).abs() < 1e-14);
        // at x = y it is the derivative
        let d = poly_derivative(&c);
        assert!((divided_difference(&c, 0.4, 0.4) - poly_eval(&d, 0.4)).abs() < 1e-14);
    }

    #[test]
    fn identity_for_linear_statistic() {
        assert!(kernel_identity_residual(&[0.0, 1.0], &[0.0, 1.0], 200).unwrap() <= 1e-8);
    }

    #[test]
    fn identity_for_constants() {
        assert_eq!(kernel_identity_residual(&[3.0], &[-1.0], 200).unwrap(), 0.0);
    }

    #[test]
    fn identity_for_mixed_degrees() {
        assert!(kernel_identity_residual(&[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0, 1.0], 200).unwrap() <= 1e-6);
    }

    #[test]
    fn identity_rejects_bad_input() {
        assert!(kernel_identity_residual(&[0.0, 1.0], &[0.0, 1.0], 10).is_err());
        assert!(kernel_identity_residual(&[1.0; 14], &[0.0, 1.0], 200).is_err());
    }
}
