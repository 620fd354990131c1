/// Streaming count, mean and sum of squared deviations.
///
/// [`push`](Self::push) is defined as a merge with a one-element accumulator,
/// so accumulating a stream value by value and merging partial accumulators
/// in the same order give bit-identical states.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MomentAccumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_value(x: f64) -> Self {
        Self { count: 1, mean: x, m2: 0.0 }
    }

    pub fn from_slice(values: &[f64]) -> Self {
        let mut acc = Self::new();
        for &v in values {
            acc.push(v);
        }
        acc
    }

    pub fn push(&mut self, x: f64) {
        self.merge(&Self::from_value(x));
    }

    /// Chan's pairwise combination; `self` holds the earlier part of the stream.
    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        let delta = other.mean - self.mean;
        self.mean += delta * (nb / n);
        self.m2 += other.m2 + delta * delta * (na * nb / n);
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    /// Unbiased sample variance, zero for fewer than two values.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed() {
        let acc = MomentAccumulator::from_slice(&[1.0, 2.0, 3.0]);
        assert_eq!(acc.count(), 3);
        assert_eq!(acc.mean(), 2.0);
        assert_eq!(acc.variance(), 1.0);
    }

    #[test]
    fn merge_equals_stream() {
        let mut a = MomentAccumulator::from_slice(&[1.0, 2.0]);
        a.merge(&MomentAccumulator::from_value(3.0));
        assert_eq!(a, MomentAccumulator::from_slice(&[1.0, 2.0, 3.0]));
    }

    #[test]
    fn merge_with_empty() {
        let a = MomentAccumulator::from_slice(&[0.1, 0.7]);
        let mut b = a;
        b.merge(&MomentAccumulator::new());
        assert_eq!(a, b);
        let mut c = MomentAccumulator::new();
        c.merge(&a);
        assert_eq!(a, c);
    }

    #[test]
    fn constant_stream_has_zero_variance() {
        let c = 0.1 + 1e8;
        let mut acc = MomentAccumulator::new();
        for _ in 0..1_000_000 {
            acc.push(c);
        }
        assert!(acc.m2() <= 1e-6);
        assert_eq!(acc.mean(), c);
        // a naive one-pass sum of squares loses everything here
        let n = 1e6;
        let naive = (c * c * n - (c * n) * (c * n) / n) / (n - 1.0);
        assert!(naive.abs() > acc.variance());
    }

    #[test]
    fn large_offset_stability() {
        let vals: Vec<f64> = (0..1000).map(|i| 1e9 + (i % 7) as f64).collect();
        let acc = MomentAccumulator::from_slice(&vals);
        let mean = vals.iter().sum::<f64>() / 1000.0;
        let two_pass = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 999.0;
        assert!((acc.variance() - two_pass).abs() < 1e-6 * two_pass);
    }
}
