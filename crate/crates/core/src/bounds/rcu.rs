use num_traits::Float;

use super::marcum::ln_ncx2_cdf;
use super::{BoundEstimate, BoundKind, DecodingStats, MessageCount};
use crate::numerics::McAccumulator;
use crate::{Error, Result};

/// `ln f`, where `f = Pr{||v - g_hat t_bar||^2 <= ||v - g_hat t||^2}` over an
/// independent codeword `t_bar ~ CN(0, rho I)`.
///
/// `2 ||v - g_hat t_bar||^2 / (rho |g_hat|^2)` is noncentral chi-square with
/// `2 nd` degrees of freedom and noncentrality `2 ||v||^2 / (rho |g_hat|^2)`.
/// With `rho |g_hat|^2 = 0` the competitor metric is `||v||^2` deterministically.
pub fn pairwise_error_prob(stats: &DecodingStats) -> f64 {
    let var = stats.snr_gain;
    if var > 0.0 {
        ln_ncx2_cdf(stats.nd, 2.0 * stats.energy / var, 2.0 * stats.mismatch / var)
    } else if stats.energy <= stats.mismatch {
        0.0
    } else {
        f64::NEG_INFINITY
    }
}

/// `min{1, (M - 1) f}`.
#[inline]
pub fn rcu_summand(stats: &DecodingStats, ln_m_minus_1: f64) -> f64 {
    let ln_term = ln_m_minus_1 + pairwise_error_prob(stats);
    if ln_term >= 0.0 {
        1.0
    } else {
        Float::exp(ln_term)
    }
}

/// Monte-Carlo RCU estimate over a cached sample set.
pub fn rcu(stats: &[DecodingStats], messages: MessageCount) -> Result<BoundEstimate> {
    if stats.is_empty() {
        return Err(Error::invalid("RCU needs at least one sample"));
    }
    if messages.is_single() {
        return Ok(BoundEstimate {
            epsilon: 0.0,
            std_error: 0.0,
            n_samples: stats.len() as u64,
            s_star: 1.0,
            kind: BoundKind::Rcu,
        });
    }
    let ln_m1 = messages.ln_m_minus_1();
    let acc: McAccumulator = stats.iter().map(|st| rcu_summand(st, ln_m1)).collect();
    Ok(BoundEstimate {
        epsilon: acc.mean(),
        std_error: acc.std_error(),
        n_samples: acc.n_samples(),
        s_star: 1.0,
        kind: BoundKind::Rcu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::rcus_summand;
    use crate::numerics::RngStream;
    use crate::C64;
    use alloc::vec::Vec;

    #[test]
    fn huge_mismatch_gives_certain_confusion() {
        let st = DecodingStats { mismatch: 1e6, energy: 2.0, snr_gain: 1.0, nd: 4 };
        assert!(pairwise_error_prob(&st).abs() < 1e-12);
    }

    #[test]
    fn degenerate_gain_is_an_indicator() {
        let st = DecodingStats { mismatch: 3.0, energy: 2.0, snr_gain: 0.0, nd: 4 };
        assert_eq!(pairwise_error_prob(&st), 0.0);
        let st = DecodingStats { mismatch: 1.0, energy: 2.0, snr_gain: 0.0, nd: 4 };
        assert_eq!(pairwise_error_prob(&st), f64::NEG_INFINITY);
        assert_eq!(rcu_summand(&st, 10.0), 0.0);
    }

    #[test]
    fn pairwise_matches_brute_force_nd2() {
        let mut rng = RngStream::new(8, 0);
        let g = C64::new(0.7, 0.5);
        let rho = 1.2;
        let t: Vec<C64> = (0..2).map(|_| rng.complex_gaussian(rho)).collect();
        let v: Vec<C64> = t.iter().map(|t| g * t + rng.complex_gaussian(1.0)).collect();
        let sample = crate::channel::ScalarChannelSample { g, g_hat: g, t, v: v.clone(), rho };
        let st = DecodingStats::from_sample(&sample);
        let f = pairwise_error_prob(&st).exp();
        let n = 1_000_000;
        let mut hits = 0u64;
        for _ in 0..n {
            let d: f64 = v.iter().map(|v| (v - g * rng.complex_gaussian(rho)).norm_sqr()).sum();
            hits += (d <= st.mismatch) as u64;
        }
        let p = hits as f64 / n as f64;
        let se = (f * (1.0 - f) / n as f64).sqrt();
        assert!((p - f).abs() < 3.0 * se, "mc {p} vs exact {f} (se {se})");
    }

    #[test]
    fn rcu_is_dominated_by_chernoff() {
        let mut rng = RngStream::new(9, 0);
        for _ in 0..500 {
            let st = DecodingStats {
                mismatch: rng.uniform() * 30.0,
                energy: rng.uniform() * 60.0,
                snr_gain: rng.uniform() * 5.0 + 1e-3,
                nd: 1 + (rng.uniform() * 20.0) as u32,
            };
            for ln_m1 in [0.0, 5.0, 20.0] {
                let r = rcu_summand(&st, ln_m1);
                for s in [1e-3, 0.05, 0.3, 1.0, 4.0, 50.0] {
                    assert!(r <= rcus_summand(&st, s, ln_m1) * (1.0 + 1e-9), "{st:?} s={s}");
                }
            }
        }
    }

    #[test]
    fn two_messages_single_term() {
        let st = DecodingStats { mismatch: 1.0, energy: 30.0, snr_gain: 1.0, nd: 2 };
        let f = pairwise_error_prob(&st).exp();
        let est = rcu(&[st], MessageCount::new(2).unwrap()).unwrap();
        assert!((est.epsilon - f).abs() <= 1e-15 * f);
        assert!(est.epsilon > 0.0 && est.epsilon < 1.0);
    }
}
