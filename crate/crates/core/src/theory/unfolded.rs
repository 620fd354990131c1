use std::f64::consts::PI;

/// Symmetry class of the unfolded reference curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryClass {
    Gue,
    Goe,
}

/// Unfolded form factor of the Gaussian ensembles at `τ` in units of the
/// Heisenberg time, divided by `N`.
pub fn k_unfolded(tau: f64, n: usize, cls: SymmetryClass) -> f64 {
    let n = n as f64;
    match cls {
        SymmetryClass::Gue => tau.min(1.0) / n,
        SymmetryClass::Goe => {
            if tau <= 1.0 {
                (2.0 * tau - tau * (2.0 * tau).ln_1p()) / n
            } else {
                (2.0 - tau * ((2.0 * tau + 1.0) / (2.0 * tau - 1.0)).ln()) / n
            }
        }
    }
}

/// Heisenberg time `πN/2` of the semicircle spectrum on `[-2, 2]`; an SFF
/// time `t` corresponds to `τ = t / (πN/2)`.
pub fn heisenberg_time(n: usize) -> f64 {
    0.5 * PI * n as f64
}
