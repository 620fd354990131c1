//! Experiment drivers. Every sample draws from its own substream and per-time
//! accumulators are reduced in sample order, so outputs do not depend on the
//! worker count.

use super::accumulator::MomentAccumulator;
use super::parallel::{try_ordered_map, Parallelism};
use crate::ensembles::{combine, sample_param, sample_wigner, tags, EnsembleSpec, HermitianMatrix, ParamLaw, StreamId};
use crate::error::{invalid, Result, SffError};
use crate::spectral::{eigenvalues, sff_eval, Spectrum, TimeGrid};

/// Spectrum of `h`, with solver failures tagged by the sample that produced it.
fn spectrum_of(h: &HermitianMatrix, seed: u64, stream: StreamId) -> Result<Spectrum> {
    eigenvalues(h).map_err(|e| match e {
        SffError::NonConvergence { .. } => SffError::EigenNonConvergence { seed, stream: stream.index },
        other => other,
    })
}

fn sff_curve(h: &HermitianMatrix, grid: &TimeGrid, seed: u64, stream: StreamId) -> Result<Vec<f64>> {
    let spec = spectrum_of(h, seed, stream)?;
    Ok(sff_eval(&spec, grid).into_iter().map(|s| s.sff).collect())
}

/// SFF curve of Wigner sample `index`.
pub fn wigner_sample_curve(spec: &EnsembleSpec, grid: &TimeGrid, index: u64) -> Result<Vec<f64>> {
    let stream = StreamId::new(tags::WIGNER, index);
    sff_curve(&sample_wigner(spec, stream), grid, spec.seed, stream)
}

/// The `k` matrices of monoparametric tuple `index`.
pub fn sample_tuple(spec: &EnsembleSpec, k: usize, index: u64) -> Vec<HermitianMatrix> {
    (0..k as u64).map(|c| sample_wigner(spec, StreamId::new(tags::MATRIX_COMPONENT + c, index))).collect()
}

/// Stream of the `j`-th parameter draw attached to tuple `index`.
pub fn param_stream(index: u64, j: u64) -> StreamId {
    StreamId::new(tags::PARAM, index).child(j)
}

/// Per-time mean, standard deviation and standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveStats {
    pub grid: TimeGrid,
    pub count: u64,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl CurveStats {
    fn from_accumulators(grid: &TimeGrid, accs: &[MomentAccumulator]) -> Self {
        Self {
            grid: grid.clone(),
            count: accs.first().map_or(0, |a| a.count()),
            mean: accs.iter().map(|a| a.mean()).collect(),
            std: accs.iter().map(|a| a.std()).collect(),
            stderr: accs.iter().map(|a| a.stderr()).collect(),
        }
    }

    pub fn variance(&self) -> Vec<f64> {
        self.std.iter().map(|s| s * s).collect()
    }
}

/// Result of the plain Wigner experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerStats {
    pub stats: CurveStats,
    /// SFF of the first sample.
    pub single: Vec<f64>,
}

fn reduce_curves(grid: &TimeGrid, curves: &[Vec<f64>]) -> Vec<MomentAccumulator> {
    let mut accs = vec![MomentAccumulator::new(); grid.len()];
    for c in curves {
        for (a, &v) in accs.iter_mut().zip(c) {
            a.push(v);
        }
    }
    accs
}

/// SFF statistics over `n_samples` independent Wigner matrices.
pub fn run_wigner_experiment(
    spec: &EnsembleSpec,
    grid: &TimeGrid,
    n_samples: usize,
    par: Parallelism,
) -> Result<WignerStats> {
    if n_samples < 2 {
        return invalid(format!("n_samples must be at least 2, got {n_samples}"));
    }
    let curves = try_ordered_map(n_samples, par, |i| wigner_sample_curve(spec, grid, i as u64))?;
    let accs = reduce_curves(grid, &curves);
    Ok(WignerStats { stats: CurveStats::from_accumulators(grid, &accs), single: curves[0].clone() })
}

/// Sampling design of the monoparametric experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MonoDesign {
    /// `n_params` parameter draws for every fixed matrix tuple.
    #[default]
    Nested,
    /// One parameter draw per matrix tuple.
    Coupled,
}

/// Sizes of the monoparametric experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonoSetup {
    pub n_pairs: usize,
    pub n_params: usize,
    /// Number of matrices combined, which must equal the parameter dimension.
    pub components: usize,
}

impl MonoSetup {
    pub fn new(n_pairs: usize, n_params: usize) -> Self {
        Self { n_pairs, n_params, components: 2 }
    }
}

/// Nested moments of the monoparametric SFF at each time.
///
/// With `a_i` and `b_i` the mean and sample variance over parameter draws for
/// tuple `i`:
/// `mean_h_mean_s = mean(a)`, `mean_h_var_s = mean(b)` and
/// `var_h_mean_s = max(0, var(a) - mean(b) / n_params)`, the outer variance
/// with the inner sampling noise removed. Standard errors are jackknife
/// estimates over tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedMoments {
    pub grid: TimeGrid,
    pub n_pairs: usize,
    pub n_params: usize,
    pub mean_h_mean_s: Vec<f64>,
    pub mean_h_var_s: Vec<f64>,
    pub var_h_mean_s: Vec<f64>,
    pub se_mean_h_mean_s: Vec<f64>,
    pub se_mean_h_var_s: Vec<f64>,
    pub se_var_h_mean_s: Vec<f64>,
    /// Sample variance of all `n_pairs * n_params` values pooled.
    pub pooled_var: Vec<f64>,
    /// `mean_h_var_s + var_h_mean_s` before clipping, with its jackknife error.
    pub decomposed_var: Vec<f64>,
    pub se_decomposed_var: Vec<f64>,
}

/// Jackknife standard error of `stat` over the rows of `rows`.
fn jackknife(n: usize, stat_without: impl Fn(usize) -> f64) -> f64 {
    let nf = n as f64;
    let loo: Vec<f64> = (0..n).map(&stat_without).collect();
    let acc = MomentAccumulator::from_slice(&loo);
    ((nf - 1.0) / nf * acc.m2()).sqrt()
}

struct TupleSummary {
    inner: Vec<MomentAccumulator>,
}

fn nested_from_summaries(grid: &TimeGrid, n_params: usize, tuples: &[TupleSummary]) -> NestedMoments {
    let n = tuples.len();
    let nf = n as f64;
    let p = n_params as f64;
    let mut out = NestedMoments {
        grid: grid.clone(),
        n_pairs: n,
        n_params,
        mean_h_mean_s: Vec::with_capacity(grid.len()),
        mean_h_var_s: Vec::with_capacity(grid.len()),
        var_h_mean_s: Vec::with_capacity(grid.len()),
        se_mean_h_mean_s: Vec::with_capacity(grid.len()),
        se_mean_h_var_s: Vec::with_capacity(grid.len()),
        se_var_h_mean_s: Vec::with_capacity(grid.len()),
        pooled_var: Vec::with_capacity(grid.len()),
        decomposed_var: Vec::with_capacity(grid.len()),
        se_decomposed_var: Vec::with_capacity(grid.len()),
    };
    for t in 0..grid.len() {
        let a: Vec<f64> = tuples.iter().map(|s| s.inner[t].mean()).collect();
        let b: Vec<f64> = tuples.iter().map(|s| s.inner[t].variance()).collect();
        let acc_a = MomentAccumulator::from_slice(&a);
        let acc_b = MomentAccumulator::from_slice(&b);
        let mut pooled = MomentAccumulator::new();
        for s in tuples {
            pooled.merge(&s.inner[t]);
        }
        let raw_var = acc_a.variance() - acc_b.mean() / p;
        out.mean_h_mean_s.push(acc_a.mean());
        out.mean_h_var_s.push(acc_b.mean());
        out.var_h_mean_s.push(raw_var.max(0.0));
        out.pooled_var.push(pooled.variance());
        out.decomposed_var.push(acc_b.mean() + raw_var);
        out.se_mean_h_mean_s.push(acc_a.stderr());
        out.se_mean_h_var_s.push(acc_b.stderr());
        if n >= 3 {
            // leave-one-out statistics from deviations about the full means
            let (ma, mb) = (acc_a.mean(), acc_b.mean());
            let d2 = acc_a.m2();
            let var_wo = |i: usize| {
                let d = a[i] - ma;
                (d2 - d * d * nf / (nf - 1.0)) / (nf - 2.0)
            };
            let mean_b_wo = |i: usize| mb + (mb - b[i]) / (nf - 1.0);
            out.se_var_h_mean_s.push(jackknife(n, |i| var_wo(i) - mean_b_wo(i) / p));
            out.se_decomposed_var.push(jackknife(n, |i| var_wo(i) + mean_b_wo(i) * (1.0 - 1.0 / p)));
        } else {
            // normal-theory fallback
            let se_var = acc_a.variance() * (2.0 / (nf - 1.0)).sqrt();
            out.se_var_h_mean_s.push(se_var);
            out.se_decomposed_var.push((se_var * se_var + acc_b.stderr().powi(2)).sqrt());
        }
    }
    out
}

fn check_mono(spec: &EnsembleSpec, law: &ParamLaw, setup: &MonoSetup) -> Result<()> {
    law.validate()?;
    if setup.n_pairs < 2 {
        return invalid(format!("n_pairs must be at least 2, got {}", setup.n_pairs));
    }
    if law.k() != setup.components {
        return Err(SffError::DimensionMismatch { expected: setup.components, got: law.k() });
    }
    let _ = spec;
    Ok(())
}

/// Nested moments of the SFF of `H^s = sum_c s_c H_c` over `n_pairs` fixed
/// matrix tuples and `n_params` parameter draws per tuple. All matrices of a
/// tuple come from the same ensemble, so their fourth cumulants agree.
pub fn run_mono_experiment(
    spec: &EnsembleSpec,
    law: &ParamLaw,
    grid: &TimeGrid,
    setup: MonoSetup,
    par: Parallelism,
) -> Result<NestedMoments> {
    check_mono(spec, law, &setup)?;
    if setup.n_params < 2 {
        return invalid(format!("n_params must be at least 2 for an inner variance, got {}", setup.n_params));
    }
    let summaries = try_ordered_map(setup.n_pairs, par, |i| {
        let tuple = sample_tuple(spec, setup.components, i as u64);
        let mut inner = vec![MomentAccumulator::new(); grid.len()];
        for j in 0..setup.n_params as u64 {
            let stream = param_stream(i as u64, j);
            let s = sample_param(law, spec.seed, stream)?;
            let h = combine(&tuple, &s)?;
            let curve = sff_curve(&h, grid, spec.seed, stream)?;
            for (a, v) in inner.iter_mut().zip(curve) {
                a.push(v);
            }
        }
        Ok(TupleSummary { inner })
    })?;
    Ok(nested_from_summaries(grid, setup.n_params, &summaries))
}

/// Statistics of the coupled design: tuple `i` is paired with the single
/// parameter draw `param_stream(i, 0)`.
pub fn run_mono_coupled(
    spec: &EnsembleSpec,
    law: &ParamLaw,
    grid: &TimeGrid,
    setup: MonoSetup,
    par: Parallelism,
) -> Result<CurveStats> {
    check_mono(spec, law, &setup)?;
    let curves = try_ordered_map(setup.n_pairs, par, |i| {
        let tuple = sample_tuple(spec, setup.components, i as u64);
        let stream = param_stream(i as u64, 0);
        let s = sample_param(law, spec.seed, stream)?;
        sff_curve(&combine(&tuple, &s)?, grid, spec.seed, stream)
    })?;
    Ok(CurveStats::from_accumulators(grid, &reduce_curves(grid, &curves)))
}

/// Source of the samples averaged in a strip study.
#[derive(Debug, Clone, PartialEq)]
pub enum StripMode {
    /// Independent Wigner matrices (the same streams as the Wigner experiment).
    Wigner,
    /// One fixed matrix tuple (tuple 0) with independent parameter draws.
    Mono { law: ParamLaw, components: usize },
}

/// Empirical-mean curves over the first `n` samples of one master stream for
/// every `n` in `counts`.
#[derive(Debug, Clone, PartialEq)]
pub struct StripCurves {
    pub grid: TimeGrid,
    pub counts: Vec<usize>,
    pub curves: Vec<Vec<f64>>,
}

pub fn run_strip_experiment(
    spec: &EnsembleSpec,
    mode: &StripMode,
    grid: &TimeGrid,
    counts: &[usize],
    par: Parallelism,
) -> Result<StripCurves> {
    if counts.is_empty() || counts.contains(&0) {
        return invalid("sample counts must be nonempty and at least 1");
    }
    let max = *counts.iter().max().expect("nonempty");
    let curves: Vec<Vec<f64>> = match mode {
        StripMode::Wigner => try_ordered_map(max, par, |i| wigner_sample_curve(spec, grid, i as u64))?,
        StripMode::Mono { law, components } => {
            law.validate()?;
            if law.k() != *components {
                return Err(SffError::DimensionMismatch { expected: *components, got: law.k() });
            }
            let tuple = sample_tuple(spec, *components, 0);
            try_ordered_map(max, par, |j| {
                let stream = param_stream(0, j as u64);
                let s = sample_param(law, spec.seed, stream)?;
                sff_curve(&combine(&tuple, &s)?, grid, spec.seed, stream)
            })?
        }
    };
    let mut accs = vec![MomentAccumulator::new(); grid.len()];
    let mut by_count = vec![Vec::new(); max + 1];
    for (i, c) in curves.iter().enumerate() {
        for (a, &v) in accs.iter_mut().zip(c) {
            a.push(v);
        }
        by_count[i + 1] = accs.iter().map(|a| a.mean()).collect();
    }
    Ok(StripCurves {
        grid: grid.clone(),
        counts: counts.to_vec(),
        curves: counts.iter().map(|&n| by_count[n].clone()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{EntryLaw, ParamPoint};

    fn grid() -> TimeGrid {
        TimeGrid::log(0.5, 20.0, 6).unwrap()
    }

    #[test]
    fn mean_of_two() {
        let spec = EnsembleSpec::new(2, EntryLaw::gue(), 3).unwrap();
        let g = grid();
        let r = run_wigner_experiment(&spec, &g, 2, Parallelism::Sequential).unwrap();
        let c0 = wigner_sample_curve(&spec, &g, 0).unwrap();
        let c1 = wigner_sample_curve(&spec, &g, 1).unwrap();
        for t in 0..g.len() {
            let mut acc = MomentAccumulator::new();
            acc.push(c0[t]);
            acc.push(c1[t]);
            assert_eq!(r.stats.mean[t], acc.mean());
        }
        assert_eq!(r.single, c0);
        assert!(run_wigner_experiment(&spec, &g, 1, Parallelism::Sequential).is_err());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let spec = EnsembleSpec::new(12, EntryLaw::goe(), 77).unwrap();
        let g = grid();
        let a = run_wigner_experiment(&spec, &g, 20, Parallelism::Sequential).unwrap();
        let b = run_wigner_experiment(&spec, &g, 20, Parallelism::Threads(2)).unwrap();
        let c = run_wigner_experiment(&spec, &g, 20, Parallelism::Threads(8)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        let law = ParamLaw::uniform_circle();
        let m1 = run_mono_experiment(&spec, &law, &g, MonoSetup::new(4, 3), Parallelism::Sequential).unwrap();
        let m8 = run_mono_experiment(&spec, &law, &g, MonoSetup::new(4, 3), Parallelism::Threads(8)).unwrap();
        assert_eq!(m1, m8);
    }

    #[test]
    fn mono_preconditions() {
        let spec = EnsembleSpec::new(4, EntryLaw::gue(), 1).unwrap();
        let law = ParamLaw::uniform_circle();
        let g = grid();
        assert!(run_mono_experiment(&spec, &law, &g, MonoSetup::new(3, 1), Parallelism::Sequential).is_err());
        assert!(run_mono_experiment(&spec, &law, &g, MonoSetup::new(1, 3), Parallelism::Sequential).is_err());
        let law3 = ParamLaw::UniformSphere { k: 3 };
        let err = run_mono_experiment(&spec, &law3, &g, MonoSetup::new(3, 3), Parallelism::Sequential).unwrap_err();
        assert!(matches!(err, SffError::DimensionMismatch { .. }));
        let mut setup = MonoSetup::new(3, 3);
        setup.components = 3;
        assert!(run_mono_experiment(&spec, &law3, &g, setup, Parallelism::Sequential).is_ok());
    }

    #[test]
    fn degenerate_law_collapses_to_wigner() {
        let spec = EnsembleSpec::new(6, EntryLaw::gue(), 5).unwrap();
        let g = grid();
        let law = ParamLaw::circle_point(0.0);
        let m = run_mono_experiment(&spec, &law, &g, MonoSetup::new(10, 3), Parallelism::Sequential).unwrap();
        // s = (1, 0) selects H_1 of each tuple
        let curves: Vec<Vec<f64>> = (0..10u64)
            .map(|i| {
                let h = &sample_tuple(&spec, 2, i)[0];
                let s = eigenvalues(h).unwrap();
                sff_eval(&s, &g).into_iter().map(|x| x.sff).collect()
            })
            .collect();
        let accs = reduce_curves(&g, &curves);
        for t in 0..g.len() {
            assert_eq!(m.mean_h_var_s[t], 0.0);
            assert!((m.var_h_mean_s[t] - accs[t].variance()).abs() <= 1e-15 * accs[t].variance().max(1e-300));
            assert!((m.mean_h_mean_s[t] - accs[t].mean()).abs() <= 1e-15);
        }
        let p = ParamPoint::new(vec![1.0, 0.0], true).unwrap();
        assert_eq!(combine(&sample_tuple(&spec, 2, 0), &p).unwrap(), sample_tuple(&spec, 2, 0)[0]);
    }

    #[test]
    fn minimal_mono_run_is_finite() {
        let spec = EnsembleSpec::new(5, EntryLaw::gue(), 2).unwrap();
        let m = run_mono_experiment(
            &spec,
            &ParamLaw::uniform_circle(),
            &grid(),
            MonoSetup::new(2, 2),
            Parallelism::Sequential,
        )
        .unwrap();
        for v in [&m.mean_h_mean_s, &m.mean_h_var_s, &m.var_h_mean_s, &m.se_var_h_mean_s, &m.se_decomposed_var] {
            assert!(v.iter().all(|x| x.is_finite() && *x >= 0.0));
        }
    }

    #[test]
    fn strip_prefix_property() {
        let spec = EnsembleSpec::new(8, EntryLaw::gue(), 9).unwrap();
        let g = grid();
        let ab = run_strip_experiment(&spec, &StripMode::Wigner, &g, &[3, 7], Parallelism::Sequential).unwrap();
        let a = run_strip_experiment(&spec, &StripMode::Wigner, &g, &[3], Parallelism::Threads(2)).unwrap();
        assert_eq!(ab.curves[0], a.curves[0]);
        let one = run_strip_experiment(&spec, &StripMode::Wigner, &g, &[1], Parallelism::Sequential).unwrap();
        assert_eq!(one.curves[0], wigner_sample_curve(&spec, &g, 0).unwrap());
        assert!(run_strip_experiment(&spec, &StripMode::Wigner, &g, &[], Parallelism::Sequential).is_err());
        assert!(run_strip_experiment(&spec, &StripMode::Wigner, &g, &[0], Parallelism::Sequential).is_err());
        let mono = StripMode::Mono { law: ParamLaw::uniform_circle(), components: 2 };
        let m = run_strip_experiment(&spec, &mono, &g, &[2, 5], Parallelism::Sequential).unwrap();
        assert_eq!(m.curves.len(), 2);
    }

    #[test]
    fn coupled_design_runs() {
        let spec = EnsembleSpec::new(6, EntryLaw::gue(), 2).unwrap();
        let c = run_mono_coupled(
            &spec,
            &ParamLaw::uniform_circle(),
            &grid(),
            MonoSetup::new(5, 1),
            Parallelism::Sequential,
        )
        .unwrap();
        assert_eq!(c.count, 5);
        assert!(c.mean.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
