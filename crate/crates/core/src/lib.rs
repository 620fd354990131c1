//! Spectral form factor (SFF) laboratory for Wigner and monoparametric
//! random matrix ensembles.
//!
//! The crate is organised bottom-up:
//!
//! * [`scalar_math`]: Bessel functions, the semicircle law, quadrature rules
//!   and the logarithmic covariance kernel.
//! * [`ensembles`]: reproducible samplers for Wigner matrices, parameter
//!   points and their linear combinations.
//! * [`spectral`]: Hermitian eigenvalues and the empirical SFF.
//! * [`montecarlo`]: streaming estimators and the experiment drivers.
//! * [`theory`]: deterministic predictions (mean, variance, residual curves,
//!   unfolded references and power-law fits).
//! * [`verify`]: the oracle/invariant suite shared by the CLI and tests.
//!
//! Monte Carlo work is spread over matrices with rayon when the `parallel`
//! feature is enabled (the default). Results are bit-identical for any worker
//! count because every sample draws from its own substream and reductions
//! run in sample order.

pub mod ensembles;
pub mod error;
pub mod montecarlo;
pub mod scalar_math;
pub mod spectral;
pub mod theory;
pub mod verify;

pub use error::{Result, SffError};
