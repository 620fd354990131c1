use crate::ensembles::{Beta, ParamLaw, ParamPoint};
use crate::error::{invalid, Result};
use crate::montecarlo::Parallelism;
use crate::scalar_math::bessel_j012;
use crate::spectral::TimeGrid;

use super::variance::{BesselSquares, PmSign};

/// Geometry of a pair of parameter points entering the covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    /// `<s, r>`.
    pub u: f64,
    /// `<s (.) s, r (.) r>`.
    pub w: f64,
    /// `||s||_4^4`.
    pub q4_s: f64,
    /// `||r||_4^4`.
    pub q4_r: f64,
}

impl KernelParams {
    pub fn from_points(s: &ParamPoint, r: &ParamPoint) -> Result<Self> {
        if s.k() != r.k() {
            return Err(crate::SffError::DimensionMismatch { expected: s.k(), got: r.k() });
        }
        Ok(Self { u: s.dot(r), w: s.hadamard_overlap(r), q4_s: s.q4(), q4_r: r.q4() })
    }

    /// The pair `s = r = (1, 0, ..)`.
    pub fn coincident_axis() -> Self {
        Self { u: 1.0, w: 1.0, q4_s: 1.0, q4_r: 1.0 }
    }
}

/// Which family of parameter laws a model describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelVariant {
    /// Normalized points on the unit circle.
    NormalizedK2,
    /// Normalized points on `S^{k-1}`, `k >= 3`.
    NormalizedK,
    /// Un-normalized points in the plane.
    UnnormalizedPlane,
}

impl ModelVariant {
    pub fn of_law(law: &ParamLaw) -> Self {
        match law {
            ParamLaw::PlaneDensity { .. } => ModelVariant::UnnormalizedPlane,
            ParamLaw::UniformSphere { k } if *k > 2 => ModelVariant::NormalizedK,
            _ => ModelVariant::NormalizedK2,
        }
    }
}

/// Budget and seeding of the Monte Carlo averages over parameter pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    pub seed: u64,
    /// Maximum number of `(s, r)` pairs per time for generic laws.
    pub max_pairs: usize,
    /// Target standard error relative to the estimate.
    pub rel_se_target: f64,
    /// Importance samples per time for the un-normalized plane model.
    pub plane_samples: usize,
    pub parallelism: Parallelism,
}

impl Default for McOptions {
    fn default() -> Self {
        Self {
            seed: 0x5eed_0f_7e57,
            max_pairs: 100_000,
            rel_se_target: 0.01,
            plane_samples: 20_000,
            parallelism: Parallelism::Global,
        }
    }
}

/// Everything the prediction formulas depend on.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub n: usize,
    pub beta: Beta,
    pub kappa4: f64,
    pub variant: ModelVariant,
    pub param_law: ParamLaw,
    pub mc: McOptions,
}

impl ModelConfig {
    /// A validated model whose variant is read off the parameter law.
    pub fn new(n: usize, beta: Beta, kappa4: f64, param_law: ParamLaw) -> Result<Self> {
        let cfg =
            Self { n, beta, kappa4, variant: ModelVariant::of_law(&param_law), param_law, mc: McOptions::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_mc(mut self, mc: McOptions) -> Self {
        self.mc = mc;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return invalid(format!("matrix dimension must be at least 2, got {}", self.n));
        }
        if !self.kappa4.is_finite() {
            return invalid("fourth cumulant must be finite");
        }
        self.param_law.validate()?;
        let consistent = match self.variant {
            ModelVariant::NormalizedK2 => self.param_law.is_normalized() && self.param_law.k() == 2,
            ModelVariant::NormalizedK => self.param_law.is_normalized(),
            ModelVariant::UnnormalizedPlane => !self.param_law.is_normalized(),
        };
        if !consistent {
            return invalid(format!("model variant {:?} does not match the parameter law", self.variant));
        }
        if !(self.mc.rel_se_target > 0.0) || self.mc.max_pairs == 0 || self.mc.plane_samples == 0 {
            return invalid("Monte Carlo budget must be positive");
        }
        Ok(())
    }

    pub fn n_f64(&self) -> f64 {
        self.n as f64
    }
}

/// `v_{±,κ}(t) = v_±(t, U) + κ_4 w J_2(2t)^2`.
pub fn v_pm_kappa(t: f64, kp: KernelParams, cfg: &ModelConfig, sign: PmSign) -> f64 {
    let base = BesselSquares::new(t).eval(kp.u, sign, cfg.beta);
    base + kappa_term(t, kp.w, cfg.kappa4)
}

pub(crate) fn kappa_term(t: f64, w: f64, kappa4: f64) -> f64 {
    if kappa4 == 0.0 || w == 0.0 {
        return 0.0;
    }
    let j2 = bessel_j012(2.0 * t)[2];
    kappa4 * w * j2 * j2
}

/// A time grid with named value columns of the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionCurve {
    pub grid: TimeGrid,
    columns: Vec<(String, Vec<f64>)>,
}

impl PredictionCurve {
    pub fn new(grid: TimeGrid) -> Self {
        Self { grid, columns: Vec::new() }
    }

    /// Append a column; its length must match the grid and every value must
    /// be finite.
    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if values.len() != self.grid.len() {
            return Err(crate::SffError::DimensionMismatch { expected: self.grid.len(), got: values.len() });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return invalid(format!("column {name} has non-finite value {v}"));
        }
        if self.get(&name).is_some() {
            return invalid(format!("duplicate column {name}"));
        }
        self.columns.push((name, values));
        Ok(())
    }

    pub fn with(mut self, name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        self.push(name, values)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(n, _)| n.as_str())
    }

    pub fn columns(&self) -> &[(String, Vec<f64>)] {
        &self.columns
    }

    /// Move all columns of `other`, which must share the grid, into `self`.
    pub fn extend(&mut self, other: PredictionCurve) -> Result<()> {
        if other.grid != self.grid {
            return invalid("cannot merge curves on different grids");
        }
        for (n, v) in other.columns {
            self.push(n, v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::variance::v_pm_series;

    #[test]
    fn kernel_params_from_points() {
        let s = ParamPoint::unit(vec![1.0, 0.0]).unwrap();
        let r = ParamPoint::unit(vec![0.0, 1.0]).unwrap();
        let kp = KernelParams::from_points(&s, &r).unwrap();
        assert_eq!(kp, KernelParams { u: 0.0, w: 0.0, q4_s: 1.0, q4_r: 1.0 });
        let r3 = ParamPoint::unit(vec![1.0, 1.0, 1.0]).unwrap();
        assert!(KernelParams::from_points(&s, &r3).is_err());
    }

    #[test]
    fn kappa_variants() {
        let gue = ModelConfig::new(50, Beta::Complex, 0.0, ParamLaw::uniform_circle()).unwrap();
        let kp = KernelParams { u: 0.4, w: 0.3, q4_s: 0.6, q4_r: 0.9 };
        assert_eq!(v_pm_kappa(2.0, kp, &gue, PmSign::Minus), v_pm_series(2.0, 0.4, PmSign::Minus, Beta::Complex));
        let kcfg = ModelConfig { kappa4: -1.5, ..gue.clone() };
        let ortho = KernelParams { u: 0.0, w: 0.0, q4_s: 1.0, q4_r: 1.0 };
        assert_eq!(v_pm_kappa(2.0, ortho, &kcfg, PmSign::Plus), 0.0);
        let ax = KernelParams::coincident_axis();
        let j2 = crate::scalar_math::bessel_j(2, 4.0);
        for sign in [PmSign::Plus, PmSign::Minus] {
            let expect = v_pm_series(2.0, 1.0, sign, Beta::Complex) - 1.5 * j2 * j2;
            assert!((v_pm_kappa(2.0, ax, &kcfg, sign) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn config_validation() {
        assert!(ModelConfig::new(1, Beta::Complex, 0.0, ParamLaw::uniform_circle()).is_err());
        assert!(ModelConfig::new(10, Beta::Complex, f64::NAN, ParamLaw::uniform_circle()).is_err());
        let plane = ModelConfig::new(10, Beta::Complex, 0.0, ParamLaw::default_plane()).unwrap();
        assert_eq!(plane.variant, ModelVariant::UnnormalizedPlane);
        let bad = ModelConfig { variant: ModelVariant::NormalizedK2, ..plane };
        assert!(bad.validate().is_err());
        let sphere = ModelConfig::new(10, Beta::Real, 0.0, ParamLaw::UniformSphere { k: 4 }).unwrap();
        assert_eq!(sphere.variant, ModelVariant::NormalizedK);
        assert!(ModelConfig::new(10, Beta::Real, 0.0, ParamLaw::DensityTable { table: None }).is_err());
    }

    #[test]
    fn prediction_curve_columns() {
        let g = TimeGrid::linear(1.0, 2.0, 3).unwrap();
        let mut c = PredictionCurve::new(g.clone());
        c.push("a", vec![1.0, 2.0, 3.0]).unwrap();
        assert!(c.push("b", vec![1.0]).is_err());
        assert!(c.push("a", vec![1.0, 2.0, 3.0]).is_err());
        assert!(c.push("c", vec![1.0, f64::NAN, 3.0]).is_err());
        assert_eq!(c.get("a"), Some(&[1.0, 2.0, 3.0][..]));
        let other = PredictionCurve::new(g).with("d", vec![0.0; 3]).unwrap();
        c.extend(other).unwrap();
        assert_eq!(c.names().collect::<Vec<_>>(), vec!["a", "d"]);
    }
}
