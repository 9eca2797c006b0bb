use alloc::vec::Vec;

use num_traits::Float;

use super::{BoundEstimate, BoundKind, DecodingStats, MessageCount, MIN_SAMPLES};
use crate::channel::SampleSource;
use crate::numerics::{McAccumulator, RngStream};
use crate::{Error, Result};

/// `exp(-max(0, i_s - ln(M - 1)))`.
#[inline]
pub fn rcus_summand(stats: &DecodingStats, s: f64, ln_m_minus_1: f64) -> f64 {
    let excess = stats.info_density(s) - ln_m_minus_1;
    if excess > 0.0 {
        Float::exp(-excess)
    } else {
        1.0
    }
}

/// Monte-Carlo RCUS estimate at a fixed `s` over a cached sample set.
pub fn rcus_given_s(stats: &[DecodingStats], messages: MessageCount, s: f64) -> Result<BoundEstimate> {
    if messages.is_single() {
        return Err(Error::invalid("RCUS needs M >= 2"));
    }
    if !(s > 0.0) || s.is_infinite() {
        return Err(Error::invalid("Chernoff parameter s must be finite and > 0"));
    }
    if stats.is_empty() {
        return Err(Error::invalid("RCUS needs at least one sample"));
    }
    let ln_m1 = messages.ln_m_minus_1();
    let acc: McAccumulator = stats.iter().map(|st| rcus_summand(st, s, ln_m1)).collect();
    Ok(BoundEstimate {
        epsilon: acc.mean(),
        std_error: acc.std_error(),
        n_samples: acc.n_samples(),
        s_star: s,
        kind: BoundKind::Rcus,
    })
}

/// How the infimum over `s` is searched: a logarithmic grid, then
/// golden-section refinement around the best grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SSearch {
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub grid_points: usize,
    /// Refinement stops once `hi / lo - 1` falls below this.
    pub rel_width: f64,
}

impl Default for SSearch {
    fn default() -> Self {
        Self {
            grid_lo: 1e-3,
            grid_hi: 1e2,
            grid_points: 25,
            rel_width: 1e-2,
        }
    }
}

impl SSearch {
    /// The same search with the grid multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            grid_lo: self.grid_lo * k,
            grid_hi: self.grid_hi * k,
            ..*self
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        let (a, b) = (Float::ln(self.grid_lo), Float::ln(self.grid_hi));
        let n = self.grid_points.max(2);
        (0..n)
            .map(|i| Float::exp(a + (b - a) * i as f64 / (n - 1) as f64))
            .collect()
    }
}

/// Minimizes `objective(s).epsilon` over `s` as described by [`SSearch`] and
/// returns the best probed estimate. The objective is expected to reuse one
/// sample set for every `s`.
pub fn minimize_over_s<F>(search: &SSearch, mut objective: F) -> Result<BoundEstimate>
where
    F: FnMut(f64) -> Result<BoundEstimate>,
{
    if !(search.grid_lo > 0.0 && search.grid_hi > search.grid_lo && search.rel_width > 0.0) {
        return Err(Error::invalid("malformed s-search specification"));
    }
    let grid = search.grid();
    let mut best: Option<BoundEstimate> = None;
    let mut best_idx = 0;
    for (i, &s) in grid.iter().enumerate() {
        let est = objective(s)?;
        if best.is_none_or(|b| est.epsilon < b.epsilon) {
            best = Some(est);
            best_idx = i;
        }
    }
    let mut best = best.expect("grid is never empty");

    // golden-section in ln s on the two grid cells around the best point
    let mut lo = Float::ln(grid[best_idx.saturating_sub(1)]);
    let mut hi = Float::ln(grid[(best_idx + 1).min(grid.len() - 1)]);
    let stop = Float::ln_1p(search.rel_width);
    let inv_phi = (Float::sqrt(5.0) - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = objective(Float::exp(x1))?;
    let mut f2 = objective(Float::exp(x2))?;
    loop {
        for f in [f1, f2] {
            if f.epsilon < best.epsilon {
                best = f;
            }
        }
        if hi - lo <= stop {
            break;
        }
        if f1.epsilon <= f2.epsilon {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(Float::exp(x1))?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(Float::exp(x2))?;
        }
    }
    Ok(best)
}

/// `1 / sigma2`, where `sigma2` is the per-symbol average of
/// `||v - g_hat t||^2`. The best `s` sits near it when the effective noise is
/// roughly Gaussian, so the `s` grid is laid out in multiples of it. Summed in
/// slice order; 1 when there is nothing to measure.
pub fn noise_scale(stats: &[DecodingStats]) -> f64 {
    let (mut e, mut n) = (0.0, 0.0);
    for st in stats {
        e += st.mismatch;
        n += st.nd as f64;
    }
    if e > 0.0 && n > 0.0 && (n / e).is_finite() {
        n / e
    } else {
        1.0
    }
}

/// Draws `n_samples` samples, sample `i` from stream `(master_seed, i)`.
pub fn collect_stats<S: SampleSource + ?Sized>(
    source: &S,
    master_seed: u64,
    n_samples: u64,
) -> Result<Vec<DecodingStats>> {
    (0..n_samples)
        .map(|i| {
            let sample = source.draw(&mut RngStream::new(master_seed, i))?;
            Ok(DecodingStats::from_sample(&sample))
        })
        .collect()
}

/// RCUS bound `inf_s E[exp(-max(0, i_s - ln(M - 1)))]`, single-threaded.
/// The `s` grid of `search` is in units of [`noise_scale`].
pub fn rcus<S: SampleSource + ?Sized>(
    source: &S,
    master_seed: u64,
    messages: MessageCount,
    n_samples: u64,
    search: &SSearch,
) -> Result<BoundEstimate> {
    if messages.is_single() {
        return Ok(BoundEstimate {
            epsilon: 0.0,
            std_error: 0.0,
            n_samples: 0,
            s_star: 1.0,
            kind: BoundKind::Rcus,
        });
    }
    if n_samples < MIN_SAMPLES {
        return Err(Error::invalid(alloc::format!(
            "need at least {MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    let stats = collect_stats(source, master_seed, n_samples)?;
    let search = search.scaled(noise_scale(&stats));
    minimize_over_s(&search, |s| rcus_given_s(&stats, messages, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::AwgnSource;
    use crate::C64;

    fn stat(mismatch: f64, energy: f64, snr_gain: f64, nd: u32) -> DecodingStats {
        DecodingStats { mismatch, energy, snr_gain, nd }
    }

    #[test]
    fn vacuous_when_density_is_small() {
        let stats = [stat(50.0, 1.0, 1.0, 2), stat(80.0, 0.5, 1.0, 2)];
        let est = rcus_given_s(&stats, MessageCount::from_bits(10), 1.0).unwrap();
        assert_eq!(est.epsilon, 1.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn single_sample_hundredth() {
        let m = MessageCount::from_bits(10);
        let s = 0.5;
        // choose the mismatch so that i_s = ln(M-1) + ln(100)
        let base = stat(0.0, 40.0, 2.0, 4);
        let target = m.ln_m_minus_1() + 100f64.ln();
        let mismatch = (base.info_density(s) - target) / s;
        assert!(mismatch > 0.0);
        let st = stat(mismatch, 40.0, 2.0, 4);
        let est = rcus_given_s(&[st], m, s).unwrap();
        assert!((est.epsilon - 0.01).abs() < 1e-12, "{}", est.epsilon);
    }

    #[test]
    fn argument_checks() {
        let st = [stat(1.0, 1.0, 1.0, 1)];
        assert!(rcus_given_s(&st, MessageCount::new(1).unwrap(), 1.0).is_err());
        assert!(rcus_given_s(&st, MessageCount::new(2).unwrap(), 0.0).is_err());
        assert!(rcus_given_s(&[], MessageCount::new(2).unwrap(), 1.0).is_err());
    }

    #[test]
    fn single_message_needs_no_samples() {
        let src = AwgnSource { gain: C64::new(1.0, 0.0), rho: 1.0, noise_var: 1.0, nd: 4 };
        let est = rcus(&src, 0, MessageCount::new(1).unwrap(), 0, &SSearch::default()).unwrap();
        assert_eq!(est.epsilon, 0.0);
        assert_eq!(est.n_samples, 0);
    }

    #[test]
    fn grid_shape() {
        let g = SSearch::default().grid();
        assert_eq!(g.len(), 25);
        assert!((g[0] - 1e-3).abs() < 1e-15 && (g[24] - 1e2).abs() < 1e-12);
    }

    #[test]
    fn search_returns_minimum_of_all_probes() {
        let mut probes = Vec::new();
        let est = minimize_over_s(&SSearch::default(), |s| {
            let e = (s.ln() - 0.7f64).powi(2) + 0.1;
            probes.push(e);
            Ok(BoundEstimate { epsilon: e, std_error: 0.0, n_samples: 1, s_star: s, kind: BoundKind::Rcus })
        })
        .unwrap();
        let min = probes.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(est.epsilon, min);
        assert!((est.s_star.ln() - 0.7).abs() < 0.01);
    }

    #[test]
    fn awgn_rcus_is_a_probability() {
        let src = AwgnSource { gain: C64::new(1.0, 0.0), rho: 1.0, noise_var: 1.0, nd: 32 };
        let est = rcus(&src, 3, MessageCount::from_bits(8), 2_000, &SSearch::default()).unwrap();
        assert!(est.epsilon > 0.0 && est.epsilon < 1.0);
        assert!(est.s_star > 0.0);
    }
}
