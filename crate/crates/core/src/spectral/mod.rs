//! Hermitian eigenvalues and the empirical spectral form factor.

pub mod eigen;
pub mod sff;

pub use eigen::{eigenvalues, tridiagonal_form, Spectrum};
pub use sff::{sff_at, sff_eval, SffSample, TimeGrid};
