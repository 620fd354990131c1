use crate::error::{invalid, Result};

/// Least-squares fit of `ln y = exponent ln t + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Points entering the regression after smoothing.
    pub points: usize,
}

/// Minimum number of points inside the fit window.
pub const MIN_FIT_POINTS: usize = 10;

/// Fit a power law to the points of `(t, y)` with `t` in `[lo, hi]`.
///
/// With `smoothing > 1` (odd), `ln y` is first replaced by its running mean
/// over `smoothing` consecutive points, a windowed geometric mean that
/// suppresses Bessel-type oscillations; points whose window would leave the
/// fit range are dropped.
pub fn fit_power_law(t: &[f64], y: &[f64], window: (f64, f64), smoothing: usize) -> Result<PowerLawFit> {
    if t.len() != y.len() {
        return Err(crate::SffError::DimensionMismatch { expected: t.len(), got: y.len() });
    }
    if smoothing == 0 || smoothing % 2 == 0 {
        return invalid(format!("smoothing width must be odd, got {smoothing}"));
    }
    let (lo, hi) = window;
    let idx: Vec<usize> = (0..t.len()).filter(|&i| t[i] >= lo && t[i] <= hi).collect();
    if idx.len() < MIN_FIT_POINTS {
        return invalid(format!(
            "power-law fit needs at least {MIN_FIT_POINTS} points in [{lo}, {hi}], got {}",
            idx.len()
        ));
    }
    if let Some(&i) = idx.iter().find(|&&i| !(y[i] > 0.0) || !(t[i] > 0.0)) {
        return invalid(format!("power-law fit needs positive values, got y({}) = {}", t[i], y[i]));
    }
    let lx: Vec<f64> = idx.iter().map(|&i| t[i].ln()).collect();
    let ly: Vec<f64> = idx.iter().map(|&i| y[i].ln()).collect();
    let h = smoothing / 2;
    let (xs, ys): (Vec<f64>, Vec<f64>) = (h..lx.len() - h)
        .map(|i| {
            let m = ly[i - h..=i + h].iter().sum::<f64>() / smoothing as f64;
            (lx[i], m)
        })
        .unzip();
    if xs.len() < 2 {
        return invalid("smoothing window leaves fewer than two points");
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).min(1.0) };
    Ok(PowerLawFit { exponent, intercept, r2, points: xs.len() })
}
