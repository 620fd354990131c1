use super::model::ModelConfig;
use crate::ensembles::Beta;
use crate::scalar_math::bessel_j012;

/// The slope function `e(t) = J_1(2t) / t`, the Fourier transform of the
/// semicircle density.
pub fn e_slope(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        // J_1(2t)/t = 1 - t^2/2 + t^4/12 - ...
        let t2 = t * t;
        return 1.0 - 0.5 * t2 + t2 * t2 / 12.0;
    }
    bessel_j012(2.0 * t)[1] / t
}

/// Expected normalized trace `N^{-1} E tr e^{itH^s}` to order `1/N` for a
/// parameter point with `||s||_4^4 = q4`.
pub fn mean_finite_n(t: f64, cfg: &ModelConfig, q4: f64) -> f64 {
    let [j0, j1, _] = bessel_j012(2.0 * t);
    let kq = cfg.kappa4 * q4;
    let mut corr = 0.0;
    if kq != 0.0 {
        corr += kq * (1.0 - 6.0 / (t * t)) * j0 + kq * (6.0 / (t * t * t) - 4.0 / t) * j1;
    }
    if cfg.beta == Beta::Real {
        corr -= 0.5 * (j0 - (2.0 * t).cos());
    }
    e_slope(t) + corr / cfg.n as f64
}
