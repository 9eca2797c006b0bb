use super::{BoundEstimate, BoundKind, MIN_SAMPLES};
use crate::channel::{SampleSource, ScalarChannelSample};
use crate::numerics::{McAccumulator, RngStream};
use crate::{Error, Result};

/// Upper limit on `nd * M` per trial.
pub const MAX_DECODER_WORK: u64 = 100_000_000;

/// One decoding attempt: the sample's `t` is codeword 1 and the other `M - 1`
/// codewords are fresh CN(0, rho) draws. Returns `true` on a decoding error;
/// ties count as errors.
pub fn true_decoder_trial(sample: &ScalarChannelSample, m: u64, rng: &mut RngStream) -> Result<bool> {
    let nd = sample.nd() as u64;
    if nd.saturating_mul(m) > MAX_DECODER_WORK {
        return Err(Error::invalid(alloc::format!(
            "nd * M = {} exceeds the decoder budget of {MAX_DECODER_WORK}",
            nd.saturating_mul(m)
        )));
    }
    let g_hat = sample.g_hat;
    let own: f64 = sample
        .v
        .iter()
        .zip(&sample.t)
        .map(|(v, t)| (v - g_hat * t).norm_sqr())
        .sum();
    for _ in 1..m {
        let mut d = 0.0;
        for v in &sample.v {
            d += (v - g_hat * rng.complex_gaussian(sample.rho)).norm_sqr();
        }
        if d <= own {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Empirical error rate of the mismatched nearest-neighbour decoder over
/// `n_trials` independent codebooks and channel draws (single-threaded).
/// Trial `i` draws its channel sample first from stream `(master_seed, i)`,
/// so the channel part coincides with sample `i` of the bound estimators.
pub fn true_decoder_error<S: SampleSource + ?Sized>(
    source: &S,
    m: u64,
    n_trials: u64,
    master_seed: u64,
) -> Result<BoundEstimate> {
    if m == 0 {
        return Err(Error::invalid("M must be >= 1"));
    }
    if n_trials < MIN_SAMPLES {
        return Err(Error::invalid(alloc::format!(
            "need at least {MIN_SAMPLES} trials, got {n_trials}"
        )));
    }
    let mut acc = McAccumulator::new();
    for i in 0..n_trials {
        let mut rng = RngStream::new(master_seed, i);
        let sample = source.draw(&mut rng)?;
        let err = true_decoder_trial(&sample, m, &mut rng)?;
        acc.push(if err { 1.0 } else { 0.0 });
    }
    Ok(BoundEstimate {
        epsilon: acc.mean(),
        std_error: acc.std_error(),
        n_samples: acc.n_samples(),
        s_star: 1.0,
        kind: BoundKind::TrueDecoder,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::AwgnSource;
    use crate::C64;

    #[test]
    fn single_codeword_never_errs() {
        let src = AwgnSource { gain: C64::new(0.1, 0.0), rho: 1.0, noise_var: 1.0, nd: 8 };
        let est = true_decoder_error(&src, 1, 1_000, 1).unwrap();
        assert_eq!(est.epsilon, 0.0);
    }

    #[test]
    fn budget_guard() {
        let src = AwgnSource { gain: C64::new(1.0, 0.0), rho: 1.0, noise_var: 1.0, nd: 10_000 };
        let s = src.draw(&mut RngStream::new(0, 0)).unwrap();
        assert!(true_decoder_trial(&s, 1 << 14, &mut RngStream::new(0, 1)).is_err());
    }

    #[test]
    fn zero_gain_always_errs_eventually() {
        // with g_hat = 0 all metrics tie, and ties are errors
        let src = AwgnSource { gain: C64::new(0.0, 0.0), rho: 1.0, noise_var: 1.0, nd: 4 };
        let est = true_decoder_error(&src, 2, 1_000, 2).unwrap();
        assert_eq!(est.epsilon, 1.0);
    }

    #[test]
    fn high_snr_awgn_rarely_errs() {
        // 30 dB, nd = 24, M = 16
        let src = AwgnSource { gain: C64::new(1.0, 0.0), rho: 1000.0, noise_var: 1.0, nd: 24 };
        let est = true_decoder_error(&src, 16, 20_000, 3).unwrap();
        assert!(est.epsilon < 1e-3, "{}", est.epsilon);
    }
}
