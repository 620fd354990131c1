//! Quadrature rules: Gauss–Chebyshev for the weight `(1 - u^2)^{-1/2}` and a
//! globally adaptive 7/15-point Gauss–Kronrod integrator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{invalid, Result, SffError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    GaussChebyshev,
    AdaptiveSegment,
}

/// A fixed set of nodes and weights, `sum_j w_j f(x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: RuleKind,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// The `n`-point Gauss–Chebyshev rule for `int_{-1}^{1} p(u) (1-u^2)^{-1/2} du`,
/// exact for polynomials of degree `2n - 1`. Nodes are returned in ascending
/// order, all weights equal `pi / n`.
///
/// # Panics
/// If `n == 0`.
pub fn gauss_chebyshev(n: usize) -> QuadratureRule {
    assert!(n >= 1, "Gauss-Chebyshev rule needs at least one node");
    let nf = n as f64;
    let nodes = (1..=n)
        .rev()
        .map(|j| {
            // cos(pi (2j-1) / 2n) written as a sine so the middle node is exactly 0
            let arg = PI * (nf + 1.0 - 2.0 * j as f64) / (2.0 * nf);
            arg.sin()
        })
        .collect();
    QuadratureRule { nodes, weights: vec![PI / nf; n], kind: RuleKind::GaussChebyshev }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Value and absolute error estimate of an adaptive integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then(other.a.total_cmp(&self.a))
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment { a, b, value: kronrod * h, error: ((kronrod - gauss) * h).abs() }
}

/// Globally adaptive Gauss–Kronrod integration.
///
/// The segment with the largest error estimate is bisected until the summed
/// error estimate falls below `max(abs_tol, rel_tol * |value|)`. All nodes lie
/// strictly inside their segments, so integrable endpoint singularities placed
/// at breakpoints are never evaluated.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-10, max_segments: 2000 }
    }
}

impl Adaptive {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }

    pub fn with_max_segments(mut self, max_segments: usize) -> Self {
        self.max_segments = max_segments;
        self
    }

    fn run<F: FnMut(f64) -> f64>(&self, f: &mut F, breakpoints: &[f64]) -> Result<(Estimate, Vec<Segment>)> {
        if breakpoints.len() < 2 {
            return invalid("adaptive quadrature needs at least two breakpoints");
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) || breakpoints.iter().any(|v| !v.is_finite()) {
            return invalid("breakpoints must be finite and strictly increasing");
        }
        let mut heap: BinaryHeap<Segment> = breakpoints.windows(2).map(|w| gk15(f, w[0], w[1])).collect();
        loop {
            let value: f64 = heap.iter().map(|s| s.value).sum();
            let error: f64 = heap.iter().map(|s| s.error).sum();
            let target = self.abs_tol.max(self.rel_tol * value.abs());
            if error <= target {
                let mut segs = heap.into_vec();
                segs.sort_by(|x, y| x.a.total_cmp(&y.a));
                return Ok((Estimate { value, error }, segs));
            }
            if heap.len() >= self.max_segments {
                return Err(SffError::NonConvergence {
                    what: "adaptive Gauss-Kronrod quadrature".into(),
                    achieved: error,
                });
            }
            let worst = heap.pop().expect("heap is never empty");
            let mid = 0.5 * (worst.a + worst.b);
            if !(worst.a < mid && mid < worst.b) {
                // segment cannot be split further in floating point
                return Err(SffError::NonConvergence {
                    what: "adaptive Gauss-Kronrod quadrature (segment underflow)".into(),
                    achieved: error,
                });
            }
            heap.push(gk15(f, worst.a, mid));
            heap.push(gk15(f, mid, worst.b));
        }
    }

    /// Integrate `f` over `[breakpoints[0], breakpoints[last]]`, starting from
    /// the given partition.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, breakpoints: &[f64]) -> Result<Estimate> {
        self.run(&mut f, breakpoints).map(|(e, _)| e)
    }

    /// The Kronrod nodes and weights of the converged partition, reusable as
    /// a fixed rule for integrands with the same difficulty profile.
    pub fn rule<F: FnMut(f64) -> f64>(&self, mut f: F, breakpoints: &[f64]) -> Result<QuadratureRule> {
        let (_, segs) = self.run(&mut f, breakpoints)?;
        let mut nodes = Vec::with_capacity(15 * segs.len());
        let mut weights = Vec::with_capacity(15 * segs.len());
        for s in segs {
            let c = 0.5 * (s.a + s.b);
            let h = 0.5 * (s.b - s.a);
            for j in 0..7 {
                nodes.push(c - h * XGK[j]);
                weights.push(h * WGK[j]);
            }
            nodes.push(c);
            weights.push(h * WGK[7]);
            for j in (0..7).rev() {
                nodes.push(c + h * XGK[j]);
                weights.push(h * WGK[j]);
            }
        }
        Ok(QuadratureRule { nodes, weights, kind: RuleKind::AdaptiveSegment })
    }
}
