//! Averages over pairs of parameter points: quadrature in the overlap `U`
//! for uniform sphere laws and Monte Carlo over sampled pairs otherwise.

use std::f64::consts::PI;

use super::model::{KernelParams, McOptions};
use super::variance::{beta_factor, BesselSquares};
use crate::ensembles::{sample_param_with, substream, tags, Beta, ParamLaw, StreamId};
use crate::error::{invalid, Result, SffError};
use crate::montecarlo::MomentAccumulator;
use crate::scalar_math::series_truncation;

/// Rule for `E f(U)` with `U = <s, r>` and `s, r` independent uniform on
/// `S^{k-1}`, whose density is proportional to `(1 - U^2)^{(k-3)/2}`.
///
/// For even `k`, `U = cos(θ)` has angle density proportional to
/// `sin^{k-2}(θ)`, a trigonometric polynomial, and the midpoint rule in `θ`
/// is exact for polynomials in `U` of degree below `2n - k + 2`; for `k = 2`
/// it coincides with Gauss–Chebyshev. For odd `k` the density is a
/// polynomial in `U` and Gauss–Legendre nodes carry it in their weights.
/// Nodes are exactly mirror symmetric, `U_{n-1-j} = -U_j`, and the weights
/// sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl OverlapRule {
    pub fn sphere(k: usize, n: usize) -> Result<Self> {
        if k < 2 {
            return invalid(format!("sphere dimension k must be at least 2, got {k}"));
        }
        if n == 0 {
            return invalid("overlap rule needs at least one node");
        }
        let (mut nodes, raw): (Vec<f64>, Vec<f64>) = if k % 2 == 0 {
            (0..n)
                .map(|j| {
                    let (s, c) = (PI * (j as f64 + 0.5) / n as f64).sin_cos();
                    (c, s.powi(k as i32 - 2))
                })
                .unzip()
        } else {
            let (x, w) = gauss_legendre(n);
            let half = (k as i32 - 3) / 2;
            let raw = x.iter().zip(&w).map(|(u, w)| w * ((1.0 - u) * (1.0 + u)).powi(half)).collect();
            (x, raw)
        };
        let total: f64 = raw.iter().sum();
        let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        for j in 0..n / 2 {
            nodes[n - 1 - j] = -nodes[j];
            weights[n - 1 - j] = weights[j];
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    /// Node count used at time `t`: exact for the squared series when that
    /// costs at most `max(256, 40 sqrt(t))` nodes, otherwise that many.
    pub fn size_for(t: f64, k: usize) -> usize {
        let exact = series_truncation(t) + k;
        let cap = 256usize.max((40.0 * t.sqrt()).ceil() as usize);
        exact.min(cap)
    }

    pub fn mirror(&self, j: usize) -> usize {
        self.nodes.len() - 1 - j
    }
}

/// Gauss–Legendre nodes (descending) and weights on `[-1, 1]` by Newton
/// iteration on the three-term recurrence.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * p - pm) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `v_-(t, U_j)` at every node of `rule` (with the factor `2/β`).
pub(crate) fn minus_at_nodes(bs: &BesselSquares, rule: &OverlapRule, beta: Beta) -> Vec<f64> {
    let f = beta_factor(beta);
    rule.nodes.iter().map(|&u| f * bs.power_sum(u)).collect()
}

/// Geometry of `count` independent pairs drawn from a normalized law; pair
/// `i` uses its own substream.
pub fn sample_pairs(law: &ParamLaw, seed: u64, count: usize) -> Result<Vec<KernelParams>> {
    if !law.is_normalized() {
        return invalid("pair geometry requires a normalized parameter law");
    }
    (0..count)
        .map(|i| {
            let mut rng = substream(seed, StreamId::new(tags::THEORY_MC, i as u64));
            let s = sample_param_with(law, &mut rng)?;
            let r = sample_param_with(law, &mut rng)?;
            KernelParams::from_points(&s, &r)
        })
        .collect()
}

/// Batch size of the adaptive Monte Carlo averages.
pub const MC_BATCH: usize = 1000;

/// Mean of `f(i)` over `i < max` in batches, stopping once the standard
/// error of `sqrt(mean)` (for `root`) or of the mean falls below
/// `opts.rel_se_target` times the estimate. Returns the estimate and its
/// standard error.
pub(crate) fn adaptive_mean(
    max: usize,
    opts: &McOptions,
    root: bool,
    what: &str,
    mut f: impl FnMut(usize) -> f64,
) -> Result<(f64, f64)> {
    let mut acc = MomentAccumulator::new();
    let mut i = 0;
    loop {
        let end = (i + MC_BATCH).min(max);
        while i < end {
            acc.push(f(i));
            i += 1;
        }
        let (value, se) = if root {
            let m = acc.mean().max(0.0);
            let v = m.sqrt();
            (v, if v > 0.0 { acc.stderr() / (2.0 * v) } else { acc.stderr().sqrt() })
        } else {
            (acc.mean(), acc.stderr())
        };
        let converged = se <= opts.rel_se_target * value.abs() || se == 0.0;
        if converged && acc.count() >= 2 * MC_BATCH.min(max) as u64 {
            return Ok((value, se));
        }
        if converged && i >= max {
            return Ok((value, se));
        }
        if i >= max {
            return Err(SffError::NonConvergence {
                what: format!("{what} after {max} Monte Carlo pairs"),
                achieved: if value != 0.0 { se / value.abs() } else { se },
            });
        }
    }
}

/// `E_s E_r v_-(t)^order` over independent `s, r` from a normalized law.
///
/// Uniform sphere laws use [`OverlapRule`]; tabulated laws use Monte Carlo
/// with the default budget.
pub fn residual_moment(t: f64, order: u32, law: &ParamLaw, beta: Beta) -> Result<f64> {
    if !(order == 1 || order == 2) {
        return invalid(format!("residual moment order must be 1 or 2, got {order}"));
    }
    if !(t > 0.0) {
        return invalid(format!("time must be positive, got {t}"));
    }
    law.validate()?;
    let bs = BesselSquares::new(t);
    match law {
        ParamLaw::UniformSphere { k } => {
            let rule = OverlapRule::sphere(*k, OverlapRule::size_for(t, *k))?;
            let v = minus_at_nodes(&bs, &rule, beta);
            Ok(rule.weights.iter().zip(&v).map(|(w, v)| w * v.powi(order as i32)).sum())
        }
        ParamLaw::DensityTable { .. } => {
            let opts = McOptions::default();
            let pairs = sample_pairs(law, opts.seed, opts.max_pairs)?;
            let f = beta_factor(beta);
            adaptive_mean(pairs.len(), &opts, false, "residual moment", |i| {
                (f * bs.power_sum(pairs[i].u)).powi(order as i32)
            })
            .map(|(m, _)| m)
        }
        ParamLaw::PlaneDensity { .. } => invalid("residual moments are defined for normalized laws"),
    }
}
