//! The subcommands. Each writes one CSV file into the output directory and
//! returns its path.

use std::path::PathBuf;

use sfflab::ensembles::{kurtosis_of, EnsembleSpec, ParamLaw};
use sfflab::montecarlo::{
    run_mono_coupled, run_mono_experiment, run_strip_experiment, run_wigner_experiment, MonoDesign, MonoSetup,
    StripMode,
};
use sfflab::spectral::TimeGrid;
use sfflab::theory::{
    curve_e_wig, curve_k_unfolded, curve_s_res, curve_s_res_unnormalized, curve_s_wig, curve_slope, McOptions,
    ModelConfig, ModelVariant, PredictionCurve,
};
use sfflab::verify::{run_suite, Check, SuiteLevel};

use crate::config::{RunConfig, StripSelection};
use crate::error::CliError;
use crate::output::{render_columns, render_table, write_file, Cell};

type Columns = Vec<(String, Vec<f64>)>;

fn ensemble(cfg: &RunConfig) -> Result<EnsembleSpec, CliError> {
    Ok(EnsembleSpec::new(cfg.n, cfg.entry_law(), cfg.seed)?)
}

/// Prediction model matching the run, with theory Monte Carlo seeded from
/// the run seed.
pub fn model(cfg: &RunConfig, law: ParamLaw) -> Result<ModelConfig, CliError> {
    let mc = McOptions { seed: cfg.seed, parallelism: cfg.parallelism(), ..McOptions::default() };
    Ok(ModelConfig::new(cfg.n, cfg.beta, kurtosis_of(cfg.entry_law()), law)?.with_mc(mc))
}

fn write_columns(cfg: &RunConfig, name: &str, grid: &TimeGrid, columns: &Columns) -> Result<PathBuf, CliError> {
    write_file(&cfg.out, name, &render_columns(cfg, grid.values(), columns))
}

fn col(name: &str, values: &[f64]) -> (String, Vec<f64>) {
    (name.to_string(), values.to_vec())
}

/// `wigner_sff.csv`: single-sample SFF and statistics over `samples` matrices.
pub fn sample_wigner(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let grid = cfg.grid()?;
    let w = run_wigner_experiment(&ensemble(cfg)?, &grid, cfg.samples, cfg.parallelism())?;
    let columns = vec![
        col("single", &w.single),
        col("mean", &w.stats.mean),
        col("std", &w.stats.std),
        col("stderr", &w.stats.stderr),
    ];
    write_columns(cfg, "wigner_sff.csv", &grid, &columns)
}

/// `mono_moments.csv` for the nested design or `mono_coupled.csv` for the
/// coupled one.
pub fn sample_mono(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let grid = cfg.grid()?;
    let spec = ensemble(cfg)?;
    let mut setup = MonoSetup::new(cfg.n_pairs, cfg.n_params);
    setup.components = cfg.param_law.k();
    match cfg.design {
        MonoDesign::Nested => {
            let m = run_mono_experiment(&spec, &cfg.param_law, &grid, setup, cfg.parallelism())?;
            let columns = vec![
                col("mean_h_mean_s", &m.mean_h_mean_s),
                col("mean_h_var_s", &m.mean_h_var_s),
                col("var_h_mean_s", &m.var_h_mean_s),
                col("se_mean_h_mean_s", &m.se_mean_h_mean_s),
                col("se_mean_h_var_s", &m.se_mean_h_var_s),
                col("se_var_h_mean_s", &m.se_var_h_mean_s),
                col("pooled_var", &m.pooled_var),
                col("decomposed_var", &m.decomposed_var),
                col("se_decomposed_var", &m.se_decomposed_var),
            ];
            write_columns(cfg, "mono_moments.csv", &grid, &columns)
        }
        MonoDesign::Coupled => {
            let s = run_mono_coupled(&spec, &cfg.param_law, &grid, setup, cfg.parallelism())?;
            let columns = vec![col("mean", &s.mean), col("std", &s.std), col("stderr", &s.stderr)];
            write_columns(cfg, "mono_coupled.csv", &grid, &columns)
        }
    }
}

/// Residual-variance columns for the configured parameter law: `s_res` and
/// `s_res_se` for normalized laws, `s_res_tilde`, `s_res_tilde_se` and
/// `s_wig_scaled` for plane laws.
fn residual_curve(grid: &TimeGrid, model: &ModelConfig) -> Result<PredictionCurve, CliError> {
    Ok(match model.variant {
        ModelVariant::UnnormalizedPlane => curve_s_res_unnormalized(grid, model)?,
        _ => curve_s_res(grid, model)?,
    })
}

/// All prediction columns on the grid.
pub fn prediction(cfg: &RunConfig, grid: &TimeGrid) -> Result<PredictionCurve, CliError> {
    let m = model(cfg, cfg.param_law.clone())?;
    let mut curve = curve_slope(grid)?;
    curve.extend(curve_e_wig(grid, &m)?)?;
    curve.extend(curve_s_wig(grid, &m)?)?;
    curve.extend(residual_curve(grid, &m)?)?;
    curve.extend(curve_k_unfolded(grid, cfg.n)?)?;
    Ok(curve)
}

/// `predict.csv`.
pub fn predict(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let grid = cfg.grid()?;
    let curve = prediction(cfg, &grid)?;
    write_columns(cfg, "predict.csv", &grid, &curve.columns().to_vec())
}

/// Strip columns: running-mean curves at every sample count with the band
/// half-width expected at that count. The Wigner band is `S_wig / sqrt(n)`.
/// The monoparametric band is `max(S_wig / sqrt(n), S_res)` because averaging
/// over parameters with one fixed tuple cannot remove the residual term.
pub fn strip_columns(cfg: &RunConfig, grid: &TimeGrid) -> Result<Columns, CliError> {
    let spec = ensemble(cfg)?;
    let wig_model = model(cfg, ParamLaw::uniform_circle())?;
    let e = curve_e_wig(grid, &wig_model)?;
    let s = curve_s_wig(grid, &wig_model)?;
    let s_wig = s.get("s_wig").expect("column").to_vec();
    let mut columns: Columns = vec![col("e_wig", e.get("e_wig").expect("column")), col("s_wig", &s_wig)];
    let band = |scale: &[f64], c: usize| -> Vec<f64> { scale.iter().map(|v| v / (c as f64).sqrt()).collect() };

    if matches!(cfg.strip_mode, StripSelection::Wigner | StripSelection::Both) {
        let st = run_strip_experiment(&spec, &StripMode::Wigner, grid, &cfg.counts, cfg.parallelism())?;
        for (c, curve) in st.counts.iter().zip(&st.curves) {
            columns.push((format!("wigner_mean_n{c}"), curve.clone()));
            columns.push((format!("wigner_band_n{c}"), band(&s_wig, *c)));
        }
    }
    if matches!(cfg.strip_mode, StripSelection::Mono | StripSelection::Both) {
        let m = model(cfg, cfg.param_law.clone())?;
        let res = residual_curve(grid, &m)?;
        let (res_name, scale) = match m.variant {
            ModelVariant::UnnormalizedPlane => ("s_res_tilde", res.get("s_wig_scaled").expect("column").to_vec()),
            _ => ("s_res", s_wig.clone()),
        };
        let s_res = res.get(res_name).expect("column").to_vec();
        let mode = StripMode::Mono { law: cfg.param_law.clone(), components: cfg.param_law.k() };
        let st = run_strip_experiment(&spec, &mode, grid, &cfg.counts, cfg.parallelism())?;
        columns.push(col(res_name, &s_res));
        for (c, curve) in st.counts.iter().zip(&st.curves) {
            let b: Vec<f64> = band(&scale, *c).iter().zip(&s_res).map(|(w, r)| w.max(*r)).collect();
            columns.push((format!("mono_mean_n{c}"), curve.clone()));
            columns.push((format!("mono_band_n{c}"), b));
        }
    }
    Ok(columns)
}

/// `strip.csv`.
pub fn strip(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let grid = cfg.grid()?;
    let columns = strip_columns(cfg, &grid)?;
    write_columns(cfg, "strip.csv", &grid, &columns)
}

/// `verify.csv` and one report line per check on stdout. A failed check
/// turns into [`CliError::VerifyFailed`] after the file is written.
pub fn verify(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let level = if cfg.quick { SuiteLevel::Quick } else { SuiteLevel::Full };
    let checks = run_suite(level, cfg.parallelism())?;
    let path = write_verify(cfg, &checks)?;
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    if failed > 0 {
        return Err(CliError::VerifyFailed { failed, total: checks.len() });
    }
    Ok(path)
}

fn write_verify(cfg: &RunConfig, checks: &[Check]) -> Result<PathBuf, CliError> {
    let header: Vec<String> = ["name", "achieved", "requirement", "passed"].iter().map(|s| s.to_string()).collect();
    let rows: Vec<Vec<Cell>> = checks
        .iter()
        .map(|c| {
            vec![
                Cell::Text(c.name.clone()),
                Cell::Real(c.achieved),
                Cell::Text(c.requirement.to_string()),
                Cell::Text(c.passed.to_string()),
            ]
        })
        .collect();
    write_file(&cfg.out, "verify.csv", &render_table(cfg, &header, &rows))
}

/// Every output file in turn; the verification suite runs last so that a
/// failed check still leaves the data files in place.
pub fn figures(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    Ok(vec![sample_wigner(cfg)?, sample_mono(cfg)?, strip(cfg)?, predict(cfg)?, verify(cfg)?])
}
