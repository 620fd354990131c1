use num_complex::Complex64;
use rand::RngCore;

use super::rng::{substream, uniform01, Normals, StreamId};
use crate::error::{invalid, Result, SffError};

/// Distribution of a standardised real variate (mean 0, variance 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntryKind {
    Gaussian,
    /// `+-1` with equal probability.
    Rademacher,
    /// Uniform on `[-sqrt 3, sqrt 3]`.
    Uniform,
    /// `0` with probability 3/4, `+-2` with probability 1/8 each. Positive
    /// fourth cumulant.
    Sparse,
}

impl EntryKind {
    pub const ALL: [EntryKind; 4] = [EntryKind::Gaussian, EntryKind::Rademacher, EntryKind::Uniform, EntryKind::Sparse];

    /// `E X^4` of the standardised variate.
    pub fn fourth_moment(self) -> f64 {
        match self {
            EntryKind::Gaussian => 3.0,
            EntryKind::Rademacher => 1.0,
            EntryKind::Uniform => 1.8,
            EntryKind::Sparse => 4.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EntryKind::Gaussian => "gaussian",
            EntryKind::Rademacher => "rademacher",
            EntryKind::Uniform => "uniform",
            EntryKind::Sparse => "sparse",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SffError::Config(format!("unknown entry law '{s}'")))
    }
}

/// Symmetry class: real symmetric (`beta = 1`) or complex Hermitian (`beta = 2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Beta {
    Real,
    Complex,
}

impl Beta {
    pub fn value(self) -> f64 {
        match self {
            Beta::Real => 1.0,
            Beta::Complex => 2.0,
        }
    }

    pub fn from_int(b: u32) -> Result<Self> {
        match b {
            1 => Ok(Beta::Real),
            2 => Ok(Beta::Complex),
            _ => Err(SffError::Config(format!("beta must be 1 or 2, got {b}"))),
        }
    }
}

/// Entry distribution of a Wigner matrix. Off-diagonal entries are
/// `X / sqrt(N)` for `beta = 1` and `(X + iY) / sqrt(2N)` for `beta = 2` with
/// independent copies `X, Y` of the standardised variate; diagonal entries
/// are `X sqrt(2 / (beta N))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EntryLaw {
    pub kind: EntryKind,
    pub beta: Beta,
}

impl EntryLaw {
    pub fn new(kind: EntryKind, beta: Beta) -> Self {
        Self { kind, beta }
    }

    pub fn gue() -> Self {
        Self::new(EntryKind::Gaussian, Beta::Complex)
    }

    pub fn goe() -> Self {
        Self::new(EntryKind::Gaussian, Beta::Real)
    }

    fn draw(&self, rng: &mut Normals<impl RngCore>) -> f64 {
        match self.kind {
            EntryKind::Gaussian => rng.next(),
            EntryKind::Rademacher => {
                if rng.rng_mut().next_u64() >> 63 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            EntryKind::Uniform => 3f64.sqrt() * (2.0 * uniform01(rng.rng_mut()) - 1.0),
            EntryKind::Sparse => {
                let w = rng.rng_mut().next_u64() >> 61; // 3 bits
                match w {
                    0 => 2.0,
                    1 => -2.0,
                    _ => 0.0,
                }
            }
        }
    }
}

/// Fourth cumulant `N^2 E|h_12|^4 - 1 - 2/beta` of the off-diagonal entries.
pub fn kurtosis_of(law: EntryLaw) -> f64 {
    let m4 = law.kind.fourth_moment();
    match law.beta {
        Beta::Real => m4 - 3.0,
        // E|X + iY|^4 / 4 = (m4 + 1) / 2
        Beta::Complex => 0.5 * (m4 - 3.0),
    }
}

/// Everything needed to draw Wigner matrices reproducibly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub n: usize,
    pub law: EntryLaw,
    pub kappa4: f64,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(n: usize, law: EntryLaw, seed: u64) -> Result<Self> {
        if n < 2 {
            return invalid(format!("matrix dimension must be at least 2, got {n}"));
        }
        Ok(Self { n, law, kappa4: kurtosis_of(law), seed })
    }

    pub fn beta(&self) -> f64 {
        self.law.beta.value()
    }
}

/// Hermitian matrix stored as its lower triangle: real parts including the
/// diagonal, imaginary parts of the strict lower triangle (absent for real
/// symmetric matrices). Element `(i, j)` with `j <= i` lives at
/// `i (i + 1) / 2 + j` in `re` and `i (i - 1) / 2 + j` in `im`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    re: Vec<f64>,
    im: Option<Vec<f64>>,
}

impl HermitianMatrix {
    pub fn zeros(n: usize, complex: bool) -> Self {
        let re = vec![0.0; n * (n + 1) / 2];
        let im = complex.then(|| vec![0.0; n * n.saturating_sub(1) / 2]);
        Self { n, re, im }
    }

    /// Build from the lower triangle given by `f(i, j)` for `j <= i`. The
    /// imaginary part of diagonal values is ignored.
    pub fn from_lower(n: usize, complex: bool, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n, complex);
        for i in 0..n {
            for j in 0..=i {
                let z = f(i, j);
                m.re[i * (i + 1) / 2 + j] = z.re;
                if j < i {
                    if let Some(im) = m.im.as_mut() {
                        im[i * (i - 1) / 2 + j] = z.im;
                    }
                }
            }
        }
        m
    }

    pub fn from_real_diagonal(values: &[f64]) -> Self {
        Self::from_lower(values.len(), false, |i, j| Complex64::new(if i == j { values[i] } else { 0.0 }, 0.0))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_complex(&self) -> bool {
        self.im.is_some()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if j > i {
            return self.get(j, i).conj();
        }
        let re = self.re[i * (i + 1) / 2 + j];
        let im = match (&self.im, j < i) {
            (Some(im), true) => im[i * (i - 1) / 2 + j],
            _ => 0.0,
        };
        Complex64::new(re, im)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.re[i * (i + 1) / 2 + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut total = 0.0;
        for i in 0..self.n {
            for j in 0..=i {
                let z = self.get(i, j);
                total += if i == j { z.re * z.re } else { 2.0 * z.norm_sqr() };
            }
        }
        total.sqrt()
    }

    /// Dense row-major copy with both triangles filled.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..=i {
                let z = self.get(i, j);
                out[i * n + j] = z;
                out[j * n + i] = z.conj();
            }
        }
        out
    }

    pub(crate) fn real_lower(&self) -> &[f64] {
        &self.re
    }

    pub(crate) fn imag_lower(&self) -> Option<&[f64]> {
        self.im.as_deref()
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut [f64], &mut Option<Vec<f64>>) {
        (&mut self.re, &mut self.im)
    }
}

/// Draw one Wigner matrix from the substream `stream` of `spec.seed`.
/// Entries are generated row by row over the lower triangle.
pub fn sample_wigner(spec: &EnsembleSpec, stream: StreamId) -> HermitianMatrix {
    let n = spec.n;
    let nf = n as f64;
    let mut g = Normals::new(substream(spec.seed, stream));
    let complex = spec.law.beta == Beta::Complex;
    let off_scale = if complex { (2.0 * nf).sqrt().recip() } else { nf.sqrt().recip() };
    let diag_scale = (2.0 / (spec.beta() * nf)).sqrt();
    let law = spec.law;
    HermitianMatrix::from_lower(n, complex, |i, j| {
        if i == j {
            Complex64::new(diag_scale * law.draw(&mut g), 0.0)
        } else if complex {
            let x = law.draw(&mut g);
            let y = law.draw(&mut g);
            Complex64::new(off_scale * x, off_scale * y)
        } else {
            Complex64::new(off_scale * law.draw(&mut g), 0.0)
        }
    })
}
