use num_traits::Float;

/// Running mean/variance (Welford) that can be merged (Chan et al.).
///
/// Single-writer: parallel code keeps one accumulator per worker or chunk and
/// merges them at the end.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct McAccumulator {
    n_samples: u64,
    mean: f64,
    m2: f64,
}

impl McAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n_samples += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n_samples as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&self, other: &Self) -> Self {
        if other.n_samples == 0 {
            return *self;
        }
        if self.n_samples == 0 {
            return *other;
        }
        let na = self.n_samples as f64;
        let nb = other.n_samples as f64;
        let n = na + nb;
        let delta = other.mean - self.mean;
        Self {
            n_samples: self.n_samples + other.n_samples,
            mean: self.mean + delta * (nb / n),
            m2: self.m2 + other.m2 + delta * delta * (na * nb / n),
        }
    }

    pub fn n_samples(&self) -> u64 {
        self.n_samples
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero with fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n_samples < 2 {
            0.0
        } else {
            (self.m2 / (self.n_samples - 1) as f64).max(0.0)
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n_samples == 0 {
            0.0
        } else {
            Float::sqrt(self.variance() / self.n_samples as f64)
        }
    }

    pub fn ci95(&self) -> f64 {
        1.96 * self.std_error()
    }
}

impl Extend<f64> for McAccumulator {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.push(x);
        }
    }
}

impl FromIterator<f64> for McAccumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        acc.extend(iter);
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn merge_with_empty_is_identity() {
        let x: McAccumulator = [1.0, 4.0, 2.5].into_iter().collect();
        assert_eq!(x.merge(&McAccumulator::new()), x);
        assert_eq!(McAccumulator::new().merge(&x), x);
    }

    #[test]
    fn merge_small() {
        let a: McAccumulator = [1.0, 2.0].into_iter().collect();
        let b: McAccumulator = [3.0, 4.0].into_iter().collect();
        let m = a.merge(&b);
        assert_eq!(m.mean(), 2.5);
        assert_eq!(m.n_samples(), 4);
        assert!((m.variance() - 5.0 / 3.0).abs() < 1e-15);
        assert!((m.ci95() - 1.96 * (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn eight_way_merge_matches_sequential() {
        let mut rng = RngStream::new(11, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| rng.uniform()).collect();
        let seq: McAccumulator = xs.iter().copied().collect();
        let par = xs
            .chunks(xs.len() / 8)
            .map(|c| c.iter().copied().collect::<McAccumulator>())
            .fold(McAccumulator::new(), |acc, c| acc.merge(&c));
        assert_eq!(par.n_samples(), seq.n_samples());
        assert!(rel_close(par.mean(), seq.mean(), 1e-12));
        assert!(rel_close(par.variance(), seq.variance(), 1e-10));
    }

    proptest! {
        #[test]
        fn merge_is_partition_independent(
            xs in proptest::collection::vec(-1e3f64..1e3, 1..300),
            cuts in proptest::collection::vec(0usize..300, 0..6),
        ) {
            let seq: McAccumulator = xs.iter().copied().collect();
            let mut cuts: Vec<usize> = cuts.into_iter().map(|c| c % (xs.len() + 1)).collect();
            cuts.sort_unstable();
            let mut parts = Vec::new();
            let mut start = 0;
            for c in cuts.into_iter().chain([xs.len()]) {
                parts.push(xs[start..c].iter().copied().collect::<McAccumulator>());
                start = c;
            }
            // left fold and right fold
            let left = parts.iter().fold(McAccumulator::new(), |a, p| a.merge(p));
            let right = parts.iter().rev().fold(McAccumulator::new(), |a, p| p.merge(&a));
            for m in [left, right] {
                prop_assert_eq!(m.n_samples(), seq.n_samples());
                prop_assert!((m.mean() - seq.mean()).abs() <= 1e-12 * (1.0 + seq.mean().abs() + 1e3));
                prop_assert!(rel_close(m.variance(), seq.variance(), 1e-9) || seq.variance() < 1e-12);
            }
        }
    }
}
