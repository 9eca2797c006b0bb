//! Minimum-SNR searches and the pilot / antenna-count sweeps.

use std::fmt;

use fblmimo_core::bounds::{BoundEstimate, MessageCount, SSearch};
use fblmimo_core::channel::{DownlinkSource, SampleSource, Scenario, SystemConfig, UplinkSource};
use fblmimo_core::ostbc::{code_for, BsDlConfig, OstbcSource};
use fblmimo_core::search::{min_snr, SnrSearch, SnrSearchResult};
use fblmimo_core::{Error, Result};

use crate::mc;

/// Which curve a CSV row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RowKind {
    BsInitDl,
    UeInitDl,
    UeInitUl,
    /// UL plus DL minimum SNR, summed in dB.
    UeTotalDbSum,
}

impl RowKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RowKind::BsInitDl => "bs-init-dl",
            RowKind::UeInitDl => "ue-init-dl",
            RowKind::UeInitUl => "ue-init-ul",
            RowKind::UeTotalDbSum => "ue-total-dbsum",
        }
    }

    pub fn of(scenario: Scenario) -> Self {
        match scenario {
            Scenario::UeInitUl => RowKind::UeInitUl,
            Scenario::UeInitDl => RowKind::UeInitDl,
            Scenario::BsInitDl => RowKind::BsInitDl,
        }
    }
}

impl fmt::Display for RowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One point of a sweep. `b_prime` is 0 for the UE-initiated links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub scenario: RowKind,
    pub b: usize,
    pub u: usize,
    pub b_prime: usize,
    pub n: usize,
    pub np: usize,
    pub snr_db: f64,
    pub s_star: f64,
    pub epsilon: f64,
    pub ci95: f64,
    pub n_samples: u64,
    pub master_seed: u64,
    /// Not written to CSV; a false value makes the CLI exit with code 4.
    pub converged: bool,
}

/// Monte-Carlo settings shared by every bound evaluation of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub master_seed: u64,
    pub n_samples: u64,
    pub s_search: SSearch,
}

/// Which link to evaluate, with the parameters beyond [`SystemConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Link {
    /// Uses the configuration's scenario (UE-initiated UL or DL).
    UeInit,
    /// BS-initiated DL with `b_prime` active antennas.
    BsInit { b_prime: usize },
}

fn with_snr(cfg: &SystemConfig, snr_db: f64) -> SystemConfig {
    let mut c = *cfg;
    match cfg.scenario {
        Scenario::UeInitUl => c.rho_ul_db = snr_db,
        Scenario::UeInitDl | Scenario::BsInitDl => c.rho_dl_db = snr_db,
    }
    c
}

fn source(cfg: &SystemConfig, link: Link, seed: u64) -> Result<Box<dyn SampleSource>> {
    Ok(match (link, cfg.scenario) {
        (Link::UeInit, Scenario::UeInitUl) => Box::new(UplinkSource::new(*cfg, 0)?),
        (Link::UeInit, Scenario::UeInitDl) => Box::new(DownlinkSource::new(*cfg, 0)?),
        (Link::BsInit { b_prime }, Scenario::BsInitDl) => {
            let code = code_for(b_prime)?;
            let bs = BsDlConfig::new(*cfg, &code)?;
            Box::new(OstbcSource::new(bs, code, seed)?)
        }
        _ => return Err(Error::InvalidArgument("link does not match the scenario".into())),
    })
}

/// RCUS estimate at the SNR already set in `cfg` (UL power for the uplink,
/// DL power otherwise).
pub fn rcus_point(cfg: &SystemConfig, link: Link, mcs: &McSettings) -> Result<BoundEstimate> {
    let src = source(cfg, link, mcs.master_seed)?;
    mc::rcus(
        src.as_ref(),
        mcs.master_seed,
        MessageCount::from_bits(cfg.payload_bits),
        mcs.n_samples,
        &mcs.s_search,
    )
}

/// Minimum SNR (dB) at which the RCUS bound reaches `target`. Every probe
/// uses the same master seed.
pub fn min_snr_for(
    cfg: &SystemConfig,
    link: Link,
    target: f64,
    search: &SnrSearch,
    mcs: &McSettings,
) -> Result<SnrSearchResult> {
    // fail early on an infeasible setup rather than inside the search
    source(cfg, link, mcs.master_seed)?;
    min_snr(search, target, |snr| {
        let c = with_snr(cfg, snr);
        let est = rcus_point(&c, link, mcs)?;
        log::debug!("{:?} at {snr:.3} dB: eps = {:.3e} +- {:.1e}", cfg.scenario, est.epsilon, est.ci95());
        Ok(est)
    })
}

fn row(cfg: &SystemConfig, b_prime: usize, r: &SnrSearchResult, mcs: &McSettings) -> SweepRow {
    SweepRow {
        scenario: RowKind::of(cfg.scenario),
        b: cfg.antennas,
        u: cfg.users,
        b_prime,
        n: cfg.blocklength,
        np: cfg.pilots,
        snr_db: r.min_snr_db,
        s_star: r.estimate.s_star,
        epsilon: r.estimate.epsilon,
        ci95: r.estimate.ci95(),
        n_samples: r.estimate.n_samples,
        master_seed: mcs.master_seed,
        converged: r.converged,
    }
}

/// Minimum SNR of one link of the UE-initiated exchange for each pilot length.
pub fn pilot_sweep_single(
    cfg: &SystemConfig,
    np_list: &[usize],
    target: f64,
    search: &SnrSearch,
    mcs: &McSettings,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(np_list.len());
    for &np in np_list {
        let mut c = *cfg;
        c.pilots = np;
        let r = min_snr_for(&c, Link::UeInit, target, search, mcs)?;
        log::info!("{:?} np = {np}: {:.3} dB", c.scenario, r.min_snr_db);
        rows.push(row(&c, 0, &r, mcs));
    }
    Ok(rows)
}

/// UE-initiated UL and DL for each pilot length, plus their dB-sum.
///
/// The DL at a given `np` is evaluated with the UL pilot power set to the UL
/// minimum SNR found for that `np`.
pub fn pilot_sweep_ue_init(
    cfg: &SystemConfig,
    np_list: &[usize],
    target_ul: f64,
    target_dl: f64,
    search: &SnrSearch,
    mcs: &McSettings,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(3 * np_list.len());
    for &np in np_list {
        let mut ul = *cfg;
        ul.pilots = np;
        ul.scenario = Scenario::UeInitUl;
        let r_ul = min_snr_for(&ul, Link::UeInit, target_ul, search, mcs)?;
        let mut dl = ul;
        dl.scenario = Scenario::UeInitDl;
        dl.rho_ul_db = r_ul.min_snr_db;
        let r_dl = min_snr_for(&dl, Link::UeInit, target_dl, search, mcs)?;
        log::info!(
            "np = {np}: UL {:.3} dB, DL {:.3} dB",
            r_ul.min_snr_db,
            r_dl.min_snr_db
        );
        let a = row(&ul, 0, &r_ul, mcs);
        let b = row(&dl, 0, &r_dl, mcs);
        rows.push(a);
        rows.push(b);
        rows.push(SweepRow {
            scenario: RowKind::UeTotalDbSum,
            snr_db: a.snr_db + b.snr_db,
            s_star: f64::NAN,
            epsilon: a.epsilon + b.epsilon,
            ci95: a.ci95.hypot(b.ci95),
            converged: a.converged && b.converged,
            ..a
        });
    }
    Ok(rows)
}

/// BS-initiated DL for every feasible `(B', np)` pair. Pairs that violate
/// `np >= B'` or leave no room for one OSTBC block are skipped.
pub fn ostbc_sweep_bs_init(
    cfg: &SystemConfig,
    bprime_list: &[usize],
    np_list: &[usize],
    target: f64,
    search: &SnrSearch,
    mcs: &McSettings,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &b_prime in bprime_list {
        let code = code_for(b_prime)?;
        for &np in np_list {
            let mut c = *cfg;
            c.pilots = np;
            c.scenario = Scenario::BsInitDl;
            if let Err(e) = BsDlConfig::new(c, &code) {
                log::info!("skipping B' = {b_prime}, np = {np}: {e}");
                continue;
            }
            let r = min_snr_for(&c, Link::BsInit { b_prime }, target, search, mcs)?;
            log::info!("B' = {b_prime}, np = {np}: {:.3} dB", r.min_snr_db);
            rows.push(row(&c, b_prime, &r, mcs));
        }
    }
    Ok(rows)
}

/// Default pilot grid: multiples of 10 in `[U, min(250, n - 1)]`.
pub fn default_np_grid(users: usize, blocklength: usize) -> Vec<usize> {
    let hi = 250.min(blocklength.saturating_sub(1));
    (1..=hi / 10).map(|k| 10 * k).filter(|&np| np >= users).collect()
}

/// Active-antenna counts swept by default in the BS-initiated DL.
pub const DEFAULT_B_PRIME: [usize; 4] = [4, 8, 10, 16];

#[cfg(test)]
mod tests {
    use super::*;
    use fblmimo_core::channel::Fading;

    fn small(scenario: Scenario) -> SystemConfig {
        SystemConfig {
            antennas: 8,
            users: 2,
            blocklength: 48,
            pilots: 8,
            payload_bits: 8,
            rho_ul_db: 5.0,
            rho_dl_db: 5.0,
            scenario,
            fading: Fading::IidRayleigh,
        }
    }

    fn mcs() -> McSettings {
        McSettings { master_seed: 1, n_samples: 2000, s_search: SSearch::default() }
    }

    #[test]
    fn np_grid() {
        assert_eq!(default_np_grid(10, 288).len(), 25);
        assert_eq!(default_np_grid(10, 288)[0], 10);
        assert_eq!(*default_np_grid(10, 288).last().unwrap(), 250);
        assert_eq!(default_np_grid(15, 100), vec![20, 30, 40, 50, 60, 70, 80, 90]);
    }

    #[test]
    fn row_order_is_alphabetical() {
        let mut k = [RowKind::UeTotalDbSum, RowKind::UeInitUl, RowKind::BsInitDl, RowKind::UeInitDl];
        k.sort();
        let names: Vec<_> = k.iter().map(|k| k.as_str()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }

    #[test]
    fn bidirectional_rows() {
        let search = SnrSearch { tol_db: 1.0, ..Default::default() };
        let rows = pilot_sweep_ue_init(&small(Scenario::UeInitUl), &[4, 12], 0.05, 0.05, &search, &mcs()).unwrap();
        assert_eq!(rows.len(), 6);
        let total = rows[2];
        assert_eq!(total.scenario, RowKind::UeTotalDbSum);
        assert_eq!(total.snr_db, rows[0].snr_db + rows[1].snr_db);
        assert!(total.s_star.is_nan());
        assert!(rows.iter().all(|r| r.epsilon <= 0.1 && r.b_prime == 0));
    }

    #[test]
    fn infeasible_pairs_skipped() {
        let search = SnrSearch { tol_db: 2.0, ..Default::default() };
        let mut cfg = small(Scenario::BsInitDl);
        cfg.blocklength = 64;
        // B' = 4 uses the rate-3/4 code (nc = 4); np = 2 < B' is skipped,
        // and so is np = 62 (no block fits)
        let rows = ostbc_sweep_bs_init(&cfg, &[4], &[2, 8, 62], 0.05, &search, &mcs()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].b_prime, rows[0].np), (4, 8));
    }
}
