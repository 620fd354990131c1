use num_complex::Complex64;

use super::eigen::Spectrum;
use crate::error::{invalid, Result};

/// Strictly increasing positive times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    values: Vec<f64>,
}

impl TimeGrid {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return invalid("time grid must be nonempty");
        }
        if values.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return invalid("time grid values must be finite and positive");
        }
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return invalid("time grid must be strictly increasing");
        }
        Ok(Self { values })
    }

    /// `points` logarithmically spaced times from `t_min` to `t_max`.
    pub fn log(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        Self::check_range(t_min, t_max, points)?;
        let (a, b) = (t_min.ln(), t_max.ln());
        let step = (b - a) / (points - 1) as f64;
        let mut values: Vec<f64> = (0..points).map(|i| (a + step * i as f64).exp()).collect();
        values[0] = t_min;
        values[points - 1] = t_max;
        Self::from_values(values)
    }

    /// `points` equally spaced times from `t_min` to `t_max`.
    pub fn linear(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        Self::check_range(t_min, t_max, points)?;
        let step = (t_max - t_min) / (points - 1) as f64;
        let mut values: Vec<f64> = (0..points).map(|i| t_min + step * i as f64).collect();
        values[points - 1] = t_max;
        Self::from_values(values)
    }

    fn check_range(t_min: f64, t_max: f64, points: usize) -> Result<()> {
        if points < 2 {
            return invalid(format!("time grid needs at least 2 points, got {points}"));
        }
        if !(t_min > 0.0 && t_min < t_max && t_max.is_finite()) {
            return invalid(format!("time grid needs 0 < t_min < t_max, got [{t_min}, {t_max}]"));
        }
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Empirical SFF at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SffSample {
    pub t: f64,
    /// `N^{-1} sum_j exp(i t lambda_j)`.
    pub phi: Complex64,
    /// `|phi|^2`.
    pub sff: f64,
}

const PAIRWISE_BLOCK: usize = 16;

fn pairwise_phase_sum(values: &[f64], t: f64) -> Complex64 {
    if values.len() <= PAIRWISE_BLOCK {
        let mut s = Complex64::new(0.0, 0.0);
        for &l in values {
            let (sn, cs) = (t * l).sin_cos();
            s += Complex64::new(cs, sn);
        }
        return s;
    }
    let mid = values.len() / 2;
    pairwise_phase_sum(&values[..mid], t) + pairwise_phase_sum(&values[mid..], t)
}

/// SFF of a spectrum at a single time `t` (any real `t`).
pub fn sff_at(spectrum: &Spectrum, t: f64) -> SffSample {
    let v = spectrum.values();
    let phi = pairwise_phase_sum(v, t) / v.len() as f64;
    SffSample { t, phi, sff: phi.norm_sqr().min(1.0) }
}

/// SFF of a spectrum over a time grid.
pub fn sff_eval(spectrum: &Spectrum, grid: &TimeGrid) -> Vec<SffSample> {
    grid.values().iter().map(|&t| sff_at(spectrum, t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_eigenvalue() {
        let s = Spectrum::new(vec![0.0]).unwrap();
        for t in [0.1, 3.0, 1e5] {
            assert_eq!(sff_at(&s, t).sff, 1.0);
        }
    }

    #[test]
    fn exact_cancellation() {
        let s = Spectrum::new(vec![0.0, PI]).unwrap();
        let r = sff_at(&s, 1.0);
        assert!(r.phi.norm() < 1e-15);
        assert!(r.sff < 1e-30);
    }

    #[test]
    fn time_zero_and_evenness() {
        let s = Spectrum::new(vec![-1.3, 0.2, 0.7, 1.9]).unwrap();
        assert_eq!(sff_at(&s, 0.0).sff, 1.0);
        for t in [0.5, 7.0, 123.0] {
            assert!((sff_at(&s, t).sff - sff_at(&s, -t).sff).abs() < 1e-15);
            assert!((sff_at(&s, -t).phi - sff_at(&s, t).phi.conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn grids() {
        let g = TimeGrid::log(1.0, 300.0, 60).unwrap();
        assert_eq!(g.len(), 60);
        assert_eq!(g.values()[0], 1.0);
        assert_eq!(g.values()[59], 300.0);
        let l = TimeGrid::linear(0.5, 2.0, 4).unwrap();
        assert_eq!(l.values(), &[0.5, 1.0, 1.5, 2.0]);
        assert!(TimeGrid::log(0.0, 1.0, 5).is_err());
        assert!(TimeGrid::log(1.0, 2.0, 1).is_err());
        assert!(TimeGrid::from_values(vec![1.0, 1.0]).is_err());
        assert!(TimeGrid::from_values(vec![]).is_err());
    }

    #[test]
    fn pairwise_matches_naive_sum() {
        let v: Vec<f64> = (0..1000).map(|i| -2.0 + 4.0 * i as f64 / 999.0).collect();
        let s = Spectrum::new(v.clone()).unwrap();
        let t = 37.5;
        let naive: Complex64 = v.iter().map(|&l| Complex64::from_polar(1.0, t * l)).sum::<Complex64>() / 1000.0;
        assert!((sff_at(&s, t).phi - naive).norm() < 1e-13);
    }
}
