use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Semicircle density `sqrt((4 - x^2)_+) / (2 pi)`.
pub fn semicircle_density(x: f64) -> f64 {
    let r = 4.0 - x * x;
    if r <= 0.0 {
        0.0
    } else {
        r.sqrt() / (2.0 * PI)
    }
}

/// Boundary value `m_sc(x + i0)` for `x` in `(-2, 2)`.
pub fn msc_boundary(x: f64) -> Complex64 {
    Complex64::new(-0.5 * x, 0.5 * (4.0 - x * x).max(0.0).sqrt())
}

/// Stieltjes transform of the semicircle law, the root of `m^2 + z m + 1 = 0`
/// with `|m| <= 1`.
///
/// For non-real `z` the root in the same half plane as `z` is returned. For
/// real `z` in `(-2, 2)` the limit from the upper half plane is returned;
/// real `z` outside that interval is rejected.
pub fn stieltjes_msc(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return invalid("spectral parameter must be finite");
    }
    if z.im == 0.0 {
        if z.re.abs() >= 2.0 {
            return invalid(format!("real spectral parameter {} outside (-2, 2)", z.re));
        }
        return Ok(msc_boundary(z.re));
    }
    // Pick the larger root without cancellation, the other is its inverse.
    let w = (z * z - 4.0).sqrt();
    let plus = -z + w;
    let minus = -z - w;
    let big = if plus.norm_sqr() >= minus.norm_sqr() { plus } else { minus } * 0.5;
    let m = big.inv();
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_values() {
        assert!((semicircle_density(0.0) - 1.0 / PI).abs() < 1e-15);
        assert_eq!(semicircle_density(2.0), 0.0);
        assert_eq!(semicircle_density(3.0), 0.0);
        assert_eq!(semicircle_density(-3.0), 0.0);
    }

    #[test]
    fn density_integrates_to_one() {
        // x = 2 cos(theta): integral becomes (2/pi) int_0^pi sin^2
        let n = 2000;
        let h = PI / n as f64;
        let total: f64 = (0..n)
            .map(|j| {
                let th = (j as f64 + 0.5) * h;
                semicircle_density(2.0 * th.cos()) * 2.0 * th.sin() * h
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn msc_at_origin_and_i() {
        let m0 = stieltjes_msc(Complex64::new(0.0, 0.0)).unwrap();
        assert!((m0 - Complex64::i()).norm() < 1e-15);

        let z = Complex64::i();
        let m = stieltjes_msc(z).unwrap();
        // quadratic formula oracle: m = i (sqrt 5 - 1)/2
        let oracle = Complex64::new(0.0, (5f64.sqrt() - 1.0) / 2.0);
        assert!((m - oracle).norm() < 1e-15);
        assert!((-m.inv() - (z + m)).norm() < 1e-14);
    }

    #[test]
    fn msc_branch_and_residual() {
        for &(re, im) in &[(0.3, 1e-3), (-1.7, -0.2), (5.0, 0.5), (-3.0, -2.0), (0.0, -7.0), (1.99, 1e-9)] {
            let z = Complex64::new(re, im);
            let m = stieltjes_msc(z).unwrap();
            assert!(m.norm() <= 1.0 + 1e-15);
            assert!((m * m + z * m + 1.0).norm() <= 1e-12);
            assert_eq!(m.im.signum(), im.signum());
        }
    }

    #[test]
    fn boundary_values() {
        for &x in &[-1.99, -1.0, 0.0, 0.4, 1.5, 1.999] {
            let m = stieltjes_msc(Complex64::new(x, 0.0)).unwrap();
            assert!((m.norm() - 1.0).abs() <= 1e-12);
            assert!((m.im - PI * semicircle_density(x)).abs() < 1e-14);
        }
        assert!(stieltjes_msc(Complex64::new(2.0, 0.0)).is_err());
        assert!(stieltjes_msc(Complex64::new(-2.5, 0.0)).is_err());
        assert!(stieltjes_msc(Complex64::new(f64::NAN, 1.0)).is_err());
    }
}
