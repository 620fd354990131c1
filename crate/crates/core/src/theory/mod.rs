//! Deterministic predictions: the slope function and finite-`N` mean, the
//! covariance functions `v_±`, the Wigner and residual curves, unfolded
//! references and power-law fits.

pub mod curves;
pub mod fit;
pub mod model;
pub mod moments;
pub mod slope;
pub mod unfolded;
pub mod variance;

pub use curves::{
    curve_e_wig, curve_k_unfolded, curve_s_res, curve_s_res_unnormalized, curve_s_wig, curve_slope, e_wig,
    mean_scaled_s_wig, s_wig, variance_combination, wigner_covariances,
};
pub use fit::{fit_power_law, PowerLawFit, MIN_FIT_POINTS};
pub use model::{v_pm_kappa, KernelParams, McOptions, ModelConfig, ModelVariant, PredictionCurve};
pub use moments::{residual_moment, sample_pairs, OverlapRule};
pub use slope::{e_slope, mean_finite_n};
pub use unfolded::{heisenberg_time, k_unfolded, SymmetryClass};
pub use variance::{v_pm_quadrature, v_pm_series, v_ss_closed, BesselSquares, PmSign, QUADRATURE_MAX_T};
