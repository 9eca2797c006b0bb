//! Parallel Monte-Carlo drivers.
//!
//! Sample `i` always comes from stream `(master_seed, i)` and partial sums are
//! taken over fixed chunks of [`CHUNK`] samples and merged in chunk order, so
//! results do not depend on the number of worker threads.

use fblmimo_core::bounds::{
    minimize_over_s, noise_scale, rcu_summand, rcus_summand, true_decoder_trial, BoundEstimate, BoundKind,
    DecodingStats, MessageCount, SSearch, MIN_SAMPLES,
};
use fblmimo_core::channel::SampleSource;
use fblmimo_core::numerics::{McAccumulator, RngStream};
use fblmimo_core::{Error, Result};
use rayon::prelude::*;

pub const CHUNK: u64 = 4096;

fn check_samples(n: u64) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_SAMPLES} samples, got {n}"
        )));
    }
    Ok(())
}

/// Draws `n` samples in parallel and keeps only their decoding statistics.
pub fn collect_stats<S: SampleSource + ?Sized>(
    source: &S,
    master_seed: u64,
    n: u64,
) -> Result<Vec<DecodingStats>> {
    let chunks: Vec<Vec<DecodingStats>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            (c * CHUNK..((c + 1) * CHUNK).min(n))
                .map(|i| {
                    let sample = source.draw(&mut RngStream::new(master_seed, i))?;
                    Ok(DecodingStats::from_sample(&sample))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Mean of `f` over `stats`, chunked and merged in order.
pub fn average<F>(stats: &[DecodingStats], f: F) -> McAccumulator
where
    F: Fn(&DecodingStats) -> f64 + Sync,
{
    let parts: Vec<McAccumulator> = stats
        .par_chunks(CHUNK as usize)
        .map(|c| c.iter().map(&f).collect())
        .collect();
    parts.iter().fold(McAccumulator::new(), |a, b| a.merge(b))
}

fn estimate(acc: &McAccumulator, s_star: f64, kind: BoundKind) -> BoundEstimate {
    BoundEstimate {
        epsilon: acc.mean(),
        std_error: acc.std_error(),
        n_samples: acc.n_samples(),
        s_star,
        kind,
    }
}

/// RCUS bound over cached statistics, minimized over `s`; the grid of
/// `search` is in units of [`noise_scale`].
pub fn rcus_from_stats(stats: &[DecodingStats], messages: MessageCount, search: &SSearch) -> Result<BoundEstimate> {
    check_samples(stats.len() as u64)?;
    if messages.is_single() {
        return Ok(BoundEstimate {
            epsilon: 0.0,
            std_error: 0.0,
            n_samples: stats.len() as u64,
            s_star: 1.0,
            kind: BoundKind::Rcus,
        });
    }
    let ln_m1 = messages.ln_m_minus_1();
    minimize_over_s(&search.scaled(noise_scale(stats)), |s| {
        let acc = average(stats, |st| rcus_summand(st, s, ln_m1));
        Ok(estimate(&acc, s, BoundKind::Rcus))
    })
}

/// RCUS bound with `n` fresh samples.
pub fn rcus<S: SampleSource + ?Sized>(
    source: &S,
    master_seed: u64,
    messages: MessageCount,
    n: u64,
    search: &SSearch,
) -> Result<BoundEstimate> {
    check_samples(n)?;
    rcus_from_stats(&collect_stats(source, master_seed, n)?, messages, search)
}

/// RCU bound over cached statistics.
pub fn rcu_from_stats(stats: &[DecodingStats], messages: MessageCount) -> Result<BoundEstimate> {
    check_samples(stats.len() as u64)?;
    let ln_m1 = messages.ln_m_minus_1();
    let acc = if messages.is_single() {
        average(stats, |_| 0.0)
    } else {
        average(stats, |st| rcu_summand(st, ln_m1))
    };
    Ok(estimate(&acc, 1.0, BoundKind::Rcu))
}

/// Error rate of the mismatched nearest-neighbour decoder with `m` codewords.
/// Trial `i` uses stream `(master_seed, i)` for the channel and then the
/// codebook, as [`fblmimo_core::bounds::true_decoder_error`] does.
pub fn true_decoder<S: SampleSource + ?Sized>(
    source: &S,
    m: u64,
    n: u64,
    master_seed: u64,
) -> Result<BoundEstimate> {
    check_samples(n)?;
    if m == 0 {
        return Err(Error::InvalidArgument("M must be >= 1".into()));
    }
    let parts: Vec<McAccumulator> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = McAccumulator::new();
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let mut rng = RngStream::new(master_seed, i);
                let sample = source.draw(&mut rng)?;
                let err = m > 1 && true_decoder_trial(&sample, m, &mut rng)?;
                acc.push(if err { 1.0 } else { 0.0 });
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let acc = parts.iter().fold(McAccumulator::new(), |a, b| a.merge(b));
    Ok(estimate(&acc, 1.0, BoundKind::TrueDecoder))
}

/// Runs `f` on a dedicated pool with `threads` workers (all cores if `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t.max(1));
    }
    match builder.build() {
        Ok(pool) => pool.install(f),
        Err(e) => {
            log::warn!("could not build a thread pool ({e}); using the global one");
            f()
        }
    }
}
