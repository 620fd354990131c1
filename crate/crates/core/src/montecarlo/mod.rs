//! Streaming estimators and the experiment drivers.

pub mod accumulator;
pub mod experiments;
pub mod parallel;

pub use accumulator::MomentAccumulator;
pub use experiments::{
    param_stream, run_mono_coupled, run_mono_experiment, run_strip_experiment, run_wigner_experiment, sample_tuple,
    wigner_sample_curve, CurveStats, MonoDesign, MonoSetup, NestedMoments, StripCurves, StripMode, WignerStats,
};
pub use parallel::{ordered_map, try_ordered_map, Parallelism};
