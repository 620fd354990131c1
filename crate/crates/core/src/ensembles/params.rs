use rand::RngCore;
use std::f64::consts::TAU;

use super::rng::{substream, uniform01, Normals, StreamId};
use super::wigner::HermitianMatrix;
use crate::error::{invalid, Result, SffError};

const NORM_TOL: f64 = 1e-12;

/// A parameter vector `s` selecting `H^s = sum_i s_i H_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPoint {
    pub coords: Vec<f64>,
    pub normalized: bool,
}

impl ParamPoint {
    /// A point of `R^k`, `k >= 2`. With `normalized` the Euclidean norm must
    /// be one to within `1e-12`.
    pub fn new(coords: Vec<f64>, normalized: bool) -> Result<Self> {
        if coords.len() < 2 {
            return invalid(format!("parameter dimension must be at least 2, got {}", coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return invalid("parameter coordinates must be finite");
        }
        let p = Self { coords, normalized };
        if normalized && (p.norm() - 1.0).abs() > NORM_TOL {
            return invalid(format!("normalized parameter has norm {}", p.norm()));
        }
        Ok(p)
    }

    /// Project a nonzero vector onto the unit sphere.
    pub fn unit(coords: Vec<f64>) -> Result<Self> {
        let n = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return invalid("cannot normalize a zero or non-finite vector");
        }
        Self::new(coords.into_iter().map(|c| c / n).collect(), true)
    }

    pub fn k(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &ParamPoint) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    /// `<s (.) s, r (.) r>`, the overlap entering the fourth-cumulant terms.
    pub fn hadamard_overlap(&self, other: &ParamPoint) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * a * b * b).sum()
    }

    /// `||s||_4^4`.
    pub fn q4(&self) -> f64 {
        self.coords.iter().map(|c| c.powi(4)).sum()
    }
}

/// Inverse cumulative distribution function tabulated at equally spaced
/// probability levels `p_j = j / (m - 1)` and interpolated linearly. The law
/// it samples has the piecewise-constant density returned by [`Self::pdf`].
#[derive(Debug, Clone, PartialEq)]
pub struct InverseCdf {
    knots: Vec<f64>,
}

impl InverseCdf {
    /// From quantile values at equally spaced levels (nondecreasing, at least
    /// two). A constant table is a point mass.
    pub fn from_quantiles(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return invalid("inverse-CDF table needs at least two knots");
        }
        if knots.iter().any(|v| !v.is_finite()) || knots.windows(2).any(|w| w[1] < w[0]) {
            return invalid("inverse-CDF knots must be finite and nondecreasing");
        }
        Ok(Self { knots })
    }

    pub fn point_mass(value: f64) -> Self {
        Self { knots: vec![value, value] }
    }

    /// Tabulate the inverse of a continuous increasing CDF on `[lo, hi]` by
    /// bisection at `m` levels.
    pub fn from_cdf(cdf: impl Fn(f64) -> f64, lo: f64, hi: f64, m: usize) -> Result<Self> {
        if !(lo < hi) || m < 2 {
            return invalid("need lo < hi and at least two levels");
        }
        let mut knots = Vec::with_capacity(m);
        for j in 0..m {
            let p = j as f64 / (m - 1) as f64;
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if cdf(mid) < p {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            knots.push(if j == 0 {
                lo
            } else if j == m - 1 {
                hi
            } else {
                0.5 * (a + b)
            });
        }
        Self::from_quantiles(knots)
    }

    pub fn is_point_mass(&self) -> bool {
        self.knots.first() == self.knots.last()
    }

    pub fn support(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().expect("nonempty"))
    }

    /// Quantile at level `u` in `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let m = self.knots.len() - 1;
        let pos = u.clamp(0.0, 1.0) * m as f64;
        let j = (pos.floor() as usize).min(m - 1);
        let frac = pos - j as f64;
        self.knots[j] + frac * (self.knots[j + 1] - self.knots[j])
    }

    /// Density of the tabulated law (zero for a point mass).
    pub fn pdf(&self, x: f64) -> f64 {
        let m = self.knots.len() - 1;
        let (lo, hi) = self.support();
        if !(x >= lo && x <= hi) || lo == hi {
            return 0.0;
        }
        let j = self.knots.partition_point(|&k| k <= x).saturating_sub(1).min(m - 1);
        let width = self.knots[j + 1] - self.knots[j];
        if width > 0.0 {
            1.0 / (m as f64 * width)
        } else {
            0.0
        }
    }

    pub fn sample(&self, rng: &mut impl RngCore) -> f64 {
        if self.is_point_mass() {
            return self.knots[0];
        }
        self.quantile(uniform01(rng))
    }
}

/// Law of the parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamLaw {
    /// Uniform on the unit sphere `S^{k-1}`.
    UniformSphere { k: usize },
    /// On the unit circle with the angle drawn from a table; `None` is a
    /// configuration error at sampling time.
    DensityTable { table: Option<InverseCdf> },
    /// Un-normalised parameters in the plane: radius from `radius`, angle
    /// uniform or from `angle`.
    PlaneDensity { radius: InverseCdf, angle: Option<InverseCdf> },
}

/// Radius bound of the default plane law.
pub const DEFAULT_PLANE_RADIUS_SQ: f64 = 2.5;

impl ParamLaw {
    pub fn uniform_circle() -> Self {
        ParamLaw::UniformSphere { k: 2 }
    }

    /// Point mass at `(cos a, sin a)` on the unit circle.
    pub fn circle_point(angle: f64) -> Self {
        ParamLaw::DensityTable { table: Some(InverseCdf::point_mass(angle)) }
    }

    /// Rotation-invariant plane density `rho(s) ~ |s|^2 (R^2 - |s|^2)^2` on the
    /// disc `|s|^2 <= R^2 = 2.5`, which vanishes at the origin and has
    /// `E|s|^2 = 1`. The squared radius over `R^2` is Beta(2, 3).
    pub fn default_plane() -> Self {
        let r2 = DEFAULT_PLANE_RADIUS_SQ;
        let r = r2.sqrt();
        let cdf = move |a: f64| {
            let u = (a * a / r2).clamp(0.0, 1.0);
            u * u * (6.0 - 8.0 * u + 3.0 * u * u)
        };
        let radius = InverseCdf::from_cdf(cdf, 0.0, r, 8193).expect("valid default table");
        ParamLaw::PlaneDensity { radius, angle: None }
    }

    /// Point mass at the plane point `s`.
    pub fn plane_point(s: [f64; 2]) -> Self {
        let a = s[0].hypot(s[1]);
        let theta = s[1].atan2(s[0]);
        ParamLaw::PlaneDensity { radius: InverseCdf::point_mass(a), angle: Some(InverseCdf::point_mass(theta)) }
    }

    /// Dimension of the parameter vectors.
    pub fn k(&self) -> usize {
        match self {
            ParamLaw::UniformSphere { k } => *k,
            _ => 2,
        }
    }

    pub fn is_normalized(&self) -> bool {
        !matches!(self, ParamLaw::PlaneDensity { .. })
    }

    /// Whether every draw returns the same point.
    pub fn is_degenerate(&self) -> bool {
        match self {
            ParamLaw::UniformSphere { .. } => false,
            ParamLaw::DensityTable { table } => table.as_ref().is_some_and(|t| t.is_point_mass()),
            ParamLaw::PlaneDensity { radius, angle } => {
                radius.is_point_mass() && angle.as_ref().is_some_and(|a| a.is_point_mass())
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ParamLaw::UniformSphere { k } if *k < 2 => {
                invalid(format!("sphere dimension k must be at least 2, got {k}"))
            }
            ParamLaw::DensityTable { table: None } => {
                Err(SffError::Config("density_table parameter law requires a sample table".into()))
            }
            ParamLaw::PlaneDensity { radius, .. } if radius.support().0 < 0.0 => {
                invalid("plane radius table must be nonnegative")
            }
            _ => Ok(()),
        }
    }
}

/// Draw a parameter point from `law` using `rng`.
pub fn sample_param_with(law: &ParamLaw, rng: &mut impl RngCore) -> Result<ParamPoint> {
    law.validate()?;
    match law {
        ParamLaw::UniformSphere { k } => {
            let mut g = Normals::new(&mut *rng);
            loop {
                let v: Vec<f64> = (0..*k).map(|_| g.next()).collect();
                let n2: f64 = v.iter().map(|c| c * c).sum();
                if n2 > 1e-300 {
                    return ParamPoint::unit(v);
                }
            }
        }
        ParamLaw::DensityTable { table } => {
            let theta = table.as_ref().expect("validated").sample(rng);
            ParamPoint::unit(vec![theta.cos(), theta.sin()])
        }
        ParamLaw::PlaneDensity { radius, angle } => {
            let a = radius.sample(rng);
            let theta = match angle {
                Some(t) => t.sample(rng),
                None => TAU * uniform01(rng),
            };
            ParamPoint::new(vec![a * theta.cos(), a * theta.sin()], false)
        }
    }
}

/// Draw a parameter point from substream `stream` of `seed`.
pub fn sample_param(law: &ParamLaw, seed: u64, stream: StreamId) -> Result<ParamPoint> {
    sample_param_with(law, &mut substream(seed, stream))
}

/// `sum_i s_i H_i`.
pub fn combine(matrices: &[HermitianMatrix], s: &ParamPoint) -> Result<HermitianMatrix> {
    if matrices.len() != s.k() {
        return Err(SffError::DimensionMismatch { expected: s.k(), got: matrices.len() });
    }
    let n = matrices[0].n();
    if let Some(bad) = matrices.iter().find(|m| m.n() != n) {
        return Err(SffError::DimensionMismatch { expected: n, got: bad.n() });
    }
    let complex = matrices.iter().any(|m| m.is_complex());
    let mut out = HermitianMatrix::zeros(n, complex);
    out.accumulate(matrices, &s.coords);
    Ok(out)
}

impl HermitianMatrix {
    fn accumulate(&mut self, matrices: &[HermitianMatrix], coeffs: &[f64]) {
        let (re, im) = self.parts_mut();
        for (m, &c) in matrices.iter().zip(coeffs) {
            for (o, v) in re.iter_mut().zip(m.real_lower()) {
                *o += c * v;
            }
            if let (Some(im), Some(src)) = (im.as_deref_mut(), m.imag_lower()) {
                for (o, v) in im.iter_mut().zip(src) {
                    *o += c * v;
                }
            }
        }
    }
}
