//! Bessel functions of the first kind for integer order.
//!
//! Small arguments (`|x| <= 12`) use the ascending power series. Larger
//! arguments use Miller's backward recurrence, normalised with the sum rule
//! `J_0^2 + 2 sum_{k>=1} J_k^2 = 1` (the sign is fixed by
//! `J_0 + 2 sum_{m>=1} J_{2m} = 1`).

/// Argument below which the power series is used for single orders.
pub const SERIES_SWITCH: f64 = 12.0;

const RESCALE_AT: f64 = 1e140;
const RESCALE_BY: f64 = 1e-140;

/// Argument above which `J_0` and `J_1` use the Hankel expansion.
pub const ASYMPTOTIC_SWITCH: f64 = 50.0;

/// `J_k(x)` for integer order `k >= 0`.
pub fn bessel_j(k: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let sign = if x < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
    let ax = x.abs();
    if k <= 1 && ax >= ASYMPTOTIC_SWITCH {
        return sign * hankel(k, ax);
    }
    // Below the switch the series is only used while its terms do not grow
    // much, i.e. for small arguments or orders beyond the turning point of
    // the term sequence; otherwise cancellation costs several digits.
    let value = if ax <= SERIES_SWITCH && (ax <= 4.0 || k as f64 >= 0.25 * ax * ax) {
        power_series(k, ax)
    } else {
        miller(k as usize, ax)[k as usize]
    };
    sign * value
}

/// `J_0(x), ..., J_kmax(x)` in one pass of backward recurrence.
pub fn bessel_j_all(kmax: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; kmax + 1];
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let mut out = if ax < 1e-3 {
        // the recurrence coefficient 2k/x overflows for tiny arguments
        (0..=kmax).map(|k| power_series(k as u32, ax)).collect()
    } else {
        miller(kmax, ax)
    };
    if x < 0.0 {
        for v in out.iter_mut().skip(1).step_by(2) {
            *v = -*v;
        }
    }
    out
}

/// Number of terms kept in `sum_k k U^k J_k(2t)^2`.
///
/// `J_k(2t)` decays super-exponentially once `k - 2t` exceeds a few multiples
/// of `(2t)^{1/3}`, so the neglected tail is far below double precision.
pub fn series_truncation(t: f64) -> usize {
    let x = 2.0 * t.abs();
    (x + 12.0 * x.cbrt() + 25.0).ceil() as usize
}

/// `J_0(x), J_1(x), J_2(x)` in constant time for any `x`.
pub fn bessel_j012(x: f64) -> [f64; 3] {
    let ax = x.abs();
    let (j0, j1) = if ax >= ASYMPTOTIC_SWITCH {
        (hankel(0, ax), hankel(1, ax))
    } else {
        let all = bessel_j_all(2, ax);
        (all[0], all[1])
    };
    let j2 = if ax >= ASYMPTOTIC_SWITCH { 2.0 / ax * j1 - j0 } else { bessel_j(2, ax) };
    let j1 = if x < 0.0 { -j1 } else { j1 };
    [j0, j1, j2]
}

/// Hankel asymptotic expansion of `J_0` and `J_1` for large positive `x`,
/// summed until the terms stop decreasing.
fn hankel(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for j in 1..200u32 {
        let jj = j as f64;
        term *= (mu - (2.0 * jj - 1.0).powi(2)) / (jj * 8.0 * x);
        if term.abs() >= last || term == 0.0 {
            break;
        }
        last = term.abs();
        match j % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    let chi = x - (0.5 * nu as f64 + 0.25) * std::f64::consts::PI;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn power_series(k: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    // (x/2)^k / k! as a running product so that huge orders underflow to 0
    // instead of overflowing.
    let mut term = 1.0;
    for j in 1..=k {
        term *= half / j as f64;
        if term == 0.0 {
            return 0.0;
        }
    }
    let q = half * half;
    let mut sum = term;
    let mut m = 0u32;
    loop {
        m += 1;
        term *= -q / (m as f64 * (m + k) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && m as f64 > half {
            break;
        }
        if m > 500 {
            break;
        }
    }
    sum
}

fn miller_start(kmax: usize, x: f64) -> usize {
    let base = (kmax as f64).max(x);
    let start = (base + 15.0 * x.max(1.0).cbrt() + 30.0).ceil() as usize;
    // even start keeps the J_{2m} bookkeeping aligned
    start + (start % 2)
}

fn miller(kmax: usize, x: f64) -> Vec<f64> {
    let start = miller_start(kmax, x);
    let mut out = vec![0.0; kmax + 1];
    let two_over_x = 2.0 / x;

    let mut above = 0.0; // j_{k+1}
    let mut current = 1.0; // j_k, arbitrary seed at k = start
    let mut sum_sq = 0.0;
    let mut sum_even = 0.0;

    let mut k = start;
    loop {
        if k <= kmax {
            out[k] = current;
        }
        if k == 0 {
            sum_sq += current * current;
            sum_even += current;
            break;
        }
        sum_sq += 2.0 * current * current;
        if k % 2 == 0 {
            sum_even += 2.0 * current;
        }
        let below = k as f64 * two_over_x * current - above;
        above = current;
        current = below;
        k -= 1;

        if current.abs() > RESCALE_AT {
            current *= RESCALE_BY;
            above *= RESCALE_BY;
            sum_even *= RESCALE_BY;
            sum_sq *= RESCALE_BY * RESCALE_BY;
            for v in out.iter_mut().skip(k + 1) {
                *v *= RESCALE_BY;
            }
        }
    }

    let scale = sum_even.signum() / sum_sq.sqrt();
    for v in out.iter_mut() {
        *v *= scale;
    }
    out
}
