//! Minimum-SNR bisection and the bidirectional error budget.

use alloc::vec::Vec;

use num_traits::Float;

use crate::bounds::BoundEstimate;
use crate::{Error, Result};

/// Bisection settings, all in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrSearch {
    pub lo_db: f64,
    pub hi_db: f64,
    /// Stop once the bracket is this narrow.
    pub tol_db: f64,
    /// Widening applied once to the edge that fails to straddle the target.
    pub widen_db: f64,
    pub max_iterations: u32,
}

impl Default for SnrSearch {
    fn default() -> Self {
        Self {
            lo_db: -10.0,
            hi_db: 40.0,
            tol_db: 0.25,
            widen_db: 20.0,
            max_iterations: 60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrSearchResult {
    /// Smallest probed SNR whose estimate meets the target.
    pub min_snr_db: f64,
    pub bracket_lo_db: f64,
    pub bracket_hi_db: f64,
    pub iterations: u32,
    /// Bracket within tolerance and the estimate at `min_snr_db` resolved to
    /// within 30% (95% confidence).
    pub converged: bool,
    /// Estimate at `min_snr_db`.
    pub estimate: BoundEstimate,
}

/// Relative 95% half-width below which an estimate counts as resolved.
pub const MAX_RELATIVE_CI: f64 = 0.3;

/// Bisects on SNR for the smallest value with `eval(snr).epsilon <= target`.
///
/// `eval` is expected to use common random numbers, so that its estimate is
/// non-increasing in SNR up to Monte-Carlo noise. An increase of more than
/// three combined 95% half-widths between any two probes aborts the search.
pub fn min_snr<F>(search: &SnrSearch, target: f64, mut eval: F) -> Result<SnrSearchResult>
where
    F: FnMut(f64) -> Result<BoundEstimate>,
{
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::invalid(alloc::format!("target must lie in (0, 1), got {target}")));
    }
    if !(search.tol_db > 0.0 && search.hi_db > search.lo_db && search.widen_db >= 0.0) {
        return Err(Error::invalid("malformed SNR search bracket"));
    }
    let mut probes: Vec<(f64, BoundEstimate)> = Vec::new();
    let mut probe = |snr: f64, probes: &mut Vec<(f64, BoundEstimate)>| -> Result<BoundEstimate> {
        let est = eval(snr)?;
        check_monotone(probes, snr, &est)?;
        probes.push((snr, est));
        Ok(est)
    };

    let mut lo = search.lo_db;
    let mut hi = search.hi_db;
    let mut f_lo = probe(lo, &mut probes)?;
    let mut f_hi;
    if f_lo.epsilon <= target {
        hi = lo;
        f_hi = f_lo;
        lo -= search.widen_db;
        f_lo = probe(lo, &mut probes)?;
        if f_lo.epsilon <= target {
            // the minimum lies below the widened bracket
            return Ok(SnrSearchResult {
                min_snr_db: lo,
                bracket_lo_db: lo,
                bracket_hi_db: lo,
                iterations: 0,
                converged: false,
                estimate: f_lo,
            });
        }
    } else {
        f_hi = probe(hi, &mut probes)?;
        if f_hi.epsilon > target {
            hi += search.widen_db;
            f_hi = probe(hi, &mut probes)?;
            if f_hi.epsilon > target {
                return Err(Error::SearchFailure(alloc::format!(
                    "target {target:e} not reached at {hi} dB (estimate {:e})",
                    f_hi.epsilon
                )));
            }
        }
    }
    let mut iterations = 0;
    while hi - lo > search.tol_db && iterations < search.max_iterations {
        let mid = 0.5 * (lo + hi);
        let f = probe(mid, &mut probes)?;
        if f.epsilon <= target {
            hi = mid;
            f_hi = f;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(SnrSearchResult {
        min_snr_db: hi,
        bracket_lo_db: lo,
        bracket_hi_db: hi,
        iterations,
        converged: hi - lo <= search.tol_db && resolved(&f_hi),
        estimate: f_hi,
    })
}

fn resolved(est: &BoundEstimate) -> bool {
    est.ci95() <= MAX_RELATIVE_CI * est.epsilon
}

fn check_monotone(probes: &[(f64, BoundEstimate)], snr: f64, est: &BoundEstimate) -> Result<()> {
    for (s, e) in probes {
        let (lo, hi) = if *s < snr { ((*s, e), (snr, est)) } else { ((snr, est), (*s, e)) };
        let slack = 3.0 * Float::hypot(lo.1.ci95(), hi.1.ci95()) + 1e-12 * lo.1.epsilon;
        if hi.1.epsilon - lo.1.epsilon > slack {
            return Err(Error::NonMonotone {
                lo_db: lo.0,
                lo_eps: lo.1.epsilon,
                hi_db: hi.0,
                hi_eps: hi.1.epsilon,
            });
        }
    }
    Ok(())
}

/// Equal split of a two-way error budget, `(eps / 2, eps / 2)`.
pub fn bidir_budget(eps_total: f64) -> Result<(f64, f64)> {
    if !(eps_total > 0.0 && eps_total < 1.0) {
        return Err(Error::invalid(alloc::format!(
            "total error probability must lie in (0, 1), got {eps_total}"
        )));
    }
    Ok((eps_total / 2.0, eps_total / 2.0))
}
