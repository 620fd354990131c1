//! Reproducible samplers for Wigner matrices, parameter points and their
//! linear combinations.

pub mod params;
pub mod rng;
pub mod wigner;

pub use params::{combine, sample_param, sample_param_with, InverseCdf, ParamLaw, ParamPoint};
pub use rng::{mix64, substream, tags, StreamId};
pub use wigner::{kurtosis_of, sample_wigner, Beta, EnsembleSpec, EntryKind, EntryLaw, HermitianMatrix};
