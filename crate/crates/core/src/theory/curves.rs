//! Prediction curves on a time grid: the Wigner mean and standard deviation
//! of the SFF and the residual standard deviation for parameter laws.

use std::f64::consts::PI;

use super::model::{KernelParams, ModelConfig, ModelVariant, PredictionCurve};
use super::moments::{adaptive_mean, minus_at_nodes, sample_pairs, OverlapRule};
use super::slope::e_slope;
use super::unfolded::{heisenberg_time, k_unfolded, SymmetryClass};
use super::variance::{beta_factor, v_ss_closed, BesselSquares, PmSign};
use crate::ensembles::rng::uniform01;
use crate::ensembles::{sample_param_with, substream, tags, InverseCdf, ParamLaw, StreamId};
use crate::error::{invalid, Result};
use crate::montecarlo::{try_ordered_map, MomentAccumulator};
use crate::scalar_math::{bessel_j012, bessel_j_all, series_truncation};
use crate::spectral::TimeGrid;

/// `(v_{+,κ}, v_{-,κ})` at `s = r = (1, 0, ..)`.
pub fn wigner_covariances(t: f64, cfg: &ModelConfig) -> (f64, f64) {
    let j2 = bessel_j012(2.0 * t)[2];
    let c = cfg.kappa4 * j2 * j2;
    (v_ss_closed(t, PmSign::Plus, cfg.beta) + c, v_ss_closed(t, PmSign::Minus, cfg.beta) + c)
}

/// `(v_+^2 + v_-^2)/N^4 + 2 e^2 (v_+ + v_-)/N^2`, the squared standard
/// deviation built from a pair of covariances.
pub fn variance_combination(vp: f64, vm: f64, e2: f64, n: usize) -> f64 {
    let n2 = (n as f64) * (n as f64);
    (vp * vp + vm * vm) / (n2 * n2) + 2.0 * e2 * (vp + vm) / n2
}

/// `E_wig(t) = e(t)^2 + v_{-,κ}(t)/N^2` at `s = r = (1, 0)`.
pub fn e_wig(t: f64, cfg: &ModelConfig) -> f64 {
    let e = e_slope(t);
    let (_, vm) = wigner_covariances(t, cfg);
    e * e + vm / (cfg.n_f64() * cfg.n_f64())
}

/// `S_wig(t)`, the standard deviation of the Wigner SFF.
pub fn s_wig(t: f64, cfg: &ModelConfig) -> f64 {
    let e = e_slope(t);
    let (vp, vm) = wigner_covariances(t, cfg);
    variance_combination(vp, vm, e * e, cfg.n).max(0.0).sqrt()
}

/// Column `e`: the slope function.
pub fn curve_slope(grid: &TimeGrid) -> Result<PredictionCurve> {
    PredictionCurve::new(grid.clone()).with("e", grid.values().iter().map(|&t| e_slope(t)).collect())
}

/// Column `e_wig`.
pub fn curve_e_wig(grid: &TimeGrid, cfg: &ModelConfig) -> Result<PredictionCurve> {
    cfg.validate()?;
    PredictionCurve::new(grid.clone()).with("e_wig", grid.values().iter().map(|&t| e_wig(t, cfg)).collect())
}

/// Column `s_wig`.
pub fn curve_s_wig(grid: &TimeGrid, cfg: &ModelConfig) -> Result<PredictionCurve> {
    cfg.validate()?;
    PredictionCurve::new(grid.clone()).with("s_wig", grid.values().iter().map(|&t| s_wig(t, cfg)).collect())
}

/// Columns `k_gue` and `k_goe`: the unfolded references at `τ = t/(πN/2)`.
pub fn curve_k_unfolded(grid: &TimeGrid, n: usize) -> Result<PredictionCurve> {
    let th = heisenberg_time(n);
    let col = |cls| grid.values().iter().map(|&t| k_unfolded(t / th, n, cls)).collect();
    PredictionCurve::new(grid.clone()).with("k_gue", col(SymmetryClass::Gue))?.with("k_goe", col(SymmetryClass::Goe))
}

/// Columns `s_res` and `s_res_se` for a normalized parameter law.
///
/// Uniform sphere laws are integrated over the overlap `U` with
/// [`OverlapRule`]. On the circle the fourth-cumulant weight
/// `w = <s (.) s, r (.) r>` equals `1/4 + U^2/2 + cos(2σ)/4` with `σ`
/// uniform and independent of `U`, so its conditional moments are exact and
/// this path also covers `κ_4 != 0`. Other laws fall back to Monte Carlo over
/// sampled pairs, stopped once the standard error reaches the target.
pub fn curve_s_res(grid: &TimeGrid, cfg: &ModelConfig) -> Result<PredictionCurve> {
    cfg.validate()?;
    if cfg.variant == ModelVariant::UnnormalizedPlane {
        return invalid("curve_s_res needs a normalized law; use curve_s_res_unnormalized for plane laws");
    }
    let ts = grid.values();
    let par = cfg.mc.parallelism;
    let rows: Vec<(f64, f64)> = match &cfg.param_law {
        ParamLaw::UniformSphere { k } if *k == 2 || cfg.kappa4 == 0.0 => {
            let k = *k;
            try_ordered_map(ts.len(), par, |i| Ok((sphere_s_res(ts[i], k, cfg.kappa4, cfg)?, 0.0)))?
        }
        law if law.is_degenerate() => {
            let pair = sample_pairs(law, cfg.mc.seed, 1)?[0];
            ts.iter().map(|&t| (pair_integrand(t, &pair, cfg).max(0.0).sqrt(), 0.0)).collect()
        }
        law => {
            let pairs = sample_pairs(law, cfg.mc.seed, cfg.mc.max_pairs)?;
            try_ordered_map(ts.len(), par, |i| {
                let t = ts[i];
                let bs = BesselSquares::new(t);
                let e = e_slope(t);
                let f = beta_factor(cfg.beta);
                let c = cfg.kappa4 * bessel_j012(2.0 * t)[2].powi(2);
                adaptive_mean(pairs.len(), &cfg.mc, true, &format!("residual deviation at t={t}"), |j| {
                    let p = &pairs[j];
                    let vm = f * bs.power_sum(p.u) + c * p.w;
                    let vp = f * bs.power_sum(-p.u) + c * p.w;
                    variance_combination(vp, vm, e * e, cfg.n)
                })
            })?
        }
    };
    let (s, se): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    PredictionCurve::new(grid.clone()).with("s_res", s)?.with("s_res_se", se)
}

fn pair_integrand(t: f64, p: &KernelParams, cfg: &ModelConfig) -> f64 {
    let bs = BesselSquares::new(t);
    let f = beta_factor(cfg.beta);
    let c = cfg.kappa4 * bessel_j012(2.0 * t)[2].powi(2);
    let e = e_slope(t);
    variance_combination(f * bs.power_sum(-p.u) + c * p.w, f * bs.power_sum(p.u) + c * p.w, e * e, cfg.n)
}

/// `S_res(t)` for `s, r` uniform on `S^{k-1}`; `kappa4` must vanish unless
/// `k = 2`.
fn sphere_s_res(t: f64, k: usize, kappa4: f64, cfg: &ModelConfig) -> Result<f64> {
    let rule = OverlapRule::sphere(k, OverlapRule::size_for(t, k))?;
    let bs = BesselSquares::new(t);
    let vm = minus_at_nodes(&bs, &rule, cfg.beta);
    let e = e_slope(t);
    let e2 = e * e;
    let c = kappa4 * bessel_j012(2.0 * t)[2].powi(2);
    let n2 = cfg.n_f64() * cfg.n_f64();
    let mut total = 0.0;
    for (j, (&u, &wt)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let (m, p) = (vm[j], vm[rule.mirror(j)]);
        let value = if c == 0.0 {
            variance_combination(p, m, e2, cfg.n)
        } else {
            let m1 = 0.25 + 0.5 * u * u;
            let m2 = m1 * m1 + 1.0 / 32.0;
            (p * p + m * m + 2.0 * c * m1 * (p + m) + 2.0 * c * c * m2) / (n2 * n2)
                + 2.0 * e2 * (p + m + 2.0 * c * m1) / n2
        };
        total += wt * value;
    }
    Ok(total.max(0.0).sqrt())
}

/// `v~_-` and the fourth-cumulant coefficient for plane points of norms
/// `a`, `b` whose directions have overlap `u`:
/// `sum_k k u^k J_k(2ta) J_k(2tb)` (times `2/β`) and `κ_4 J_2(2ta) J_2(2tb)`.
fn plane_covariance(t: f64, a: f64, b: f64, u: f64, cfg: &ModelConfig) -> (f64, f64) {
    let kmax = series_truncation(t * a.min(b)).max(2);
    let ja = bessel_j_all(kmax, 2.0 * t * a);
    let jb = bessel_j_all(kmax, 2.0 * t * b);
    let mut acc = 0.0;
    for k in (1..=kmax).rev() {
        acc = acc * u + k as f64 * ja[k] * jb[k];
    }
    (beta_factor(cfg.beta) * acc * u, cfg.kappa4 * ja[2] * jb[2])
}

/// Contribution of one plane pair to `S~_res^2`, averaged over the pair's
/// reflection `u -> -u` and over the direction sum on which the
/// fourth-cumulant weight depends (uniform angle laws only).
fn plane_symmetric_integrand(t: f64, a: f64, b: f64, u: f64, cfg: &ModelConfig) -> f64 {
    let (vm, c) = plane_covariance(t, a, b, u, cfg);
    let m1 = 0.25 + 0.5 * u * u;
    let m2 = m1 * m1 + 1.0 / 32.0;
    let ee = e_slope(t * a) * e_slope(t * b);
    let n2 = cfg.n_f64() * cfg.n_f64();
    2.0 * (vm * vm + 2.0 * c * vm * m1 + c * c * m2) / (n2 * n2) + 4.0 * ee * (vm + c * m1) / n2
}

/// Contribution of one explicit plane pair to `S~_res^2`.
fn plane_pair_integrand(t: f64, s: &[f64], r: &[f64], cfg: &ModelConfig) -> f64 {
    let a = s[0].hypot(s[1]);
    let b = r[0].hypot(r[1]);
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let u = ((s[0] * r[0] + s[1] * r[1]) / (a * b)).clamp(-1.0, 1.0);
    let w = ((s[0] * r[0]).powi(2) + (s[1] * r[1]).powi(2)) / (a * a * b * b);
    let (vm, c) = plane_covariance(t, a, b, u, cfg);
    let (vp, _) = plane_covariance(t, a, b, -u, cfg);
    variance_combination(vp + c * w, vm + c * w, e_slope(t * a) * e_slope(t * b), cfg.n)
}

/// Columns `s_res_tilde`, `s_res_tilde_se` and `s_wig_scaled` for a plane law.
///
/// `S~_res(t)^2` averages the pair variance with `H^s = |s| H^{s/|s|}`, so
/// each covariance series carries `J_k(2t|s|) J_k(2t|r|)`. For laws with a
/// uniform angle and a continuous radius the average is estimated by
/// importance sampling concentrated where the pair variance peaks: nearly
/// parallel directions (`1 - U ~ 1/t`) and nearly equal norms. The
/// proposal mixes the target law with half-Cauchy and Cauchy components, so
/// the importance weights stay below 4. Column `s_wig_scaled` is
/// `E_s S_wig(|s| t)`.
pub fn curve_s_res_unnormalized(grid: &TimeGrid, cfg: &ModelConfig) -> Result<PredictionCurve> {
    cfg.validate()?;
    let ParamLaw::PlaneDensity { radius, angle } = &cfg.param_law else {
        return invalid("curve_s_res_unnormalized needs a plane parameter law");
    };
    let ts = grid.values();
    let par = cfg.mc.parallelism;
    let rows: Vec<(f64, f64)> = if radius.is_point_mass() && angle.as_ref().is_none_or(|a| a.is_point_mass()) {
        let a0 = radius.quantile(0.5);
        match angle {
            None => try_ordered_map(ts.len(), par, |i| Ok((sphere_s_res(ts[i] * a0, 2, cfg.kappa4, cfg)?, 0.0)))?,
            Some(th) => {
                let th = th.quantile(0.5);
                let s = [a0 * th.cos(), a0 * th.sin()];
                ts.iter().map(|&t| (plane_pair_integrand(t, &s, &s, cfg).max(0.0).sqrt(), 0.0)).collect()
            }
        }
    } else if angle.is_none() && !radius.is_point_mass() {
        try_ordered_map(ts.len(), par, |i| Ok(importance_s_res(ts[i], radius, cfg)))?
    } else {
        let law = &cfg.param_law;
        let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..cfg.mc.max_pairs)
            .map(|i| {
                let mut rng = substream(cfg.mc.seed, StreamId::new(tags::THEORY_MC, i as u64));
                let s = sample_param_with(law, &mut rng)?;
                let r = sample_param_with(law, &mut rng)?;
                Ok((s.coords, r.coords))
            })
            .collect::<Result<_>>()?;
        try_ordered_map(ts.len(), par, |i| {
            let t = ts[i];
            adaptive_mean(pairs.len(), &cfg.mc, true, &format!("plane residual deviation at t={t}"), |j| {
                plane_pair_integrand(t, &pairs[j].0, &pairs[j].1, cfg)
            })
        })?
    };
    let scaled: Vec<f64> = ts.iter().map(|&t| mean_scaled_s_wig(t, radius, cfg)).collect();
    let (s, se): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    PredictionCurve::new(grid.clone()).with("s_res_tilde", s)?.with("s_res_tilde_se", se)?.with("s_wig_scaled", scaled)
}

/// Quantile levels used for averages over the radius law.
const RADIUS_LEVELS: usize = 2048;

/// `E_s S_wig(|s| t)` by the midpoint rule in the quantile level.
pub fn mean_scaled_s_wig(t: f64, radius: &InverseCdf, cfg: &ModelConfig) -> f64 {
    if radius.is_point_mass() {
        return s_wig(t * radius.quantile(0.5), cfg);
    }
    let m = RADIUS_LEVELS;
    (0..m).map(|j| s_wig(t * radius.quantile((j as f64 + 0.5) / m as f64), cfg)).sum::<f64>() / m as f64
}

/// Importance-sampling estimate of `S~_res(t)` and its standard error for a
/// uniform angle and the radius law `radius`.
///
/// Proposal: `a` from the radius law; the angle gap `δ` in `[0, π]` from an
/// equal mixture of the uniform law and a half-Cauchy of scale
/// `sqrt(2/t)`; `b` from an equal mixture of the radius law and a Cauchy
/// centred at `a` with scale `max(1/t, t ε^2)`, `ε = 1 - cos δ`.
fn importance_s_res(t: f64, radius: &InverseCdf, cfg: &ModelConfig) -> (f64, f64) {
    let mut rng = substream(cfg.mc.seed, StreamId::new(tags::THEORY_MC, t.to_bits()));
    let gamma = (2.0 / t).sqrt();
    let atan_span = (PI / gamma).atan();
    let mut acc = MomentAccumulator::new();
    for _ in 0..cfg.mc.plane_samples {
        let a = radius.sample(&mut rng);
        let delta = if uniform01(&mut rng) < 0.5 {
            PI * uniform01(&mut rng)
        } else {
            gamma * (uniform01(&mut rng) * atan_span).tan()
        };
        let q_delta = 0.5 / PI + 0.5 * gamma / ((gamma * gamma + delta * delta) * atan_span);
        let half = (0.5 * delta).sin();
        let eps = 2.0 * half * half;
        let h = (1.0 / t).max(t * eps * eps);
        let b = if uniform01(&mut rng) < 0.5 {
            radius.sample(&mut rng)
        } else {
            a + h * (PI * (uniform01(&mut rng) - 0.5)).tan()
        };
        let rho_b = radius.pdf(b);
        if !(rho_b > 0.0) || !(b > 0.0) || !(a > 0.0) {
            acc.push(0.0);
            continue;
        }
        let q_b = 0.5 * rho_b + 0.5 * h / (PI * (h * h + (b - a) * (b - a)));
        let weight = rho_b / (PI * q_delta * q_b);
        acc.push(weight * plane_symmetric_integrand(t, a, b, delta.cos(), cfg));
    }
    let m = acc.mean().max(0.0);
    let s = m.sqrt();
    (s, if s > 0.0 { acc.stderr() / (2.0 * s) } else { 0.0 })
}
