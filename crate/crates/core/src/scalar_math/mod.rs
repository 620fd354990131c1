//! Special functions, quadrature rules and the logarithmic covariance kernel.

pub mod bessel;
pub mod kernel;
pub mod quadrature;
pub mod semicircle;

pub use bessel::{bessel_j, bessel_j012, bessel_j_all, series_truncation};
pub use kernel::{kernel_identity_residual, log_kernel_v, log_kernel_v_angle};
pub use quadrature::{gauss_chebyshev, Adaptive, Estimate, QuadratureRule, RuleKind};
pub use semicircle::{msc_boundary, semicircle_density, stieltjes_msc};
