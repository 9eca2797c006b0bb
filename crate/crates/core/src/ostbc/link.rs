use alloc::vec::Vec;

use num_traits::Float;

use super::code::{symbol_estimates_into, OstbcCode};
use crate::channel::{SampleSource, ScalarChannelSample, Scenario, SystemConfig};
use crate::numerics::{dot_conj, norm, CMatrix, RngStream};
use crate::{Error, Result, C64};

/// Stream id reserved for the antenna map of an [`OstbcSource`]; sample
/// streams count up from zero and never reach it.
pub const REDUCTION_STREAM: u64 = u64::MAX;

/// BS-initiated downlink setup: `np_dl` DL pilot channel uses followed by
/// `ell` OSTBC blocks of `nc` channel uses from `b_prime` active antennas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsDlConfig {
    pub base: SystemConfig,
    pub b_prime: usize,
    pub np_dl: usize,
    pub ell: usize,
}

impl BsDlConfig {
    /// Uses `base.pilots` as the DL pilot length and fits as many OSTBC
    /// blocks as possible: `ell = floor((n - np) / nc)`.
    pub fn new(base: SystemConfig, code: &OstbcCode) -> Result<Self> {
        if base.scenario != Scenario::BsInitDl {
            return Err(Error::invalid("OSTBC link needs the BS-initiated DL scenario"));
        }
        base.validate()?;
        let b_prime = code.b_prime();
        let np_dl = base.pilots;
        if b_prime > base.antennas {
            return Err(Error::invalid(alloc::format!(
                "B' = {b_prime} exceeds B = {}",
                base.antennas
            )));
        }
        if np_dl < b_prime {
            return Err(Error::invalid(alloc::format!(
                "need np >= B' for orthogonal DL pilots (np = {np_dl}, B' = {b_prime})"
            )));
        }
        let ell = base.blocklength.saturating_sub(np_dl) / code.nc();
        if ell < 1 {
            return Err(Error::invalid(alloc::format!(
                "no OSTBC block fits: np + nc = {} > n = {}",
                np_dl + code.nc(),
                base.blocklength
            )));
        }
        Ok(Self { base, b_prime, np_dl, ell })
    }

    /// Data blocklength seen by the decoder, `ns * ell`.
    pub fn nd(&self, code: &OstbcCode) -> usize {
        code.ns() * self.ell
    }

    fn check(&self, code: &OstbcCode) -> Result<()> {
        if code.b_prime() != self.b_prime
            || self.ell < 1
            || self.np_dl < self.b_prime
            || self.np_dl + self.ell * code.nc() > self.base.blocklength
        {
            return Err(Error::invalid("BS-initiated DL configuration does not match the code"));
        }
        Ok(())
    }
}

/// `B x B'` matrix with orthonormal columns: Gram-Schmidt on the leading
/// `B'` columns of a `B x B` i.i.d. Gaussian matrix (the remaining columns
/// are dropped, so they are never drawn).
pub fn reduce_matrix(b: usize, b_prime: usize, rng: &mut RngStream) -> Result<CMatrix> {
    if b_prime > b || b_prime == 0 {
        return Err(Error::invalid(alloc::format!(
            "need 1 <= B' <= B, got B' = {b_prime}, B = {b}"
        )));
    }
    let mut u = CMatrix::gaussian(b, b_prime, 1.0, rng);
    for j in 0..b_prime {
        // modified Gram-Schmidt, twice for stability
        for _ in 0..2 {
            for k in 0..j {
                let c = dot_conj(u.col(k), u.col(j));
                let (head, tail) = split_cols(&mut u, k, j);
                for (x, e) in tail.iter_mut().zip(head.iter()) {
                    *x -= e * c;
                }
            }
        }
        let n = norm(u.col(j));
        if !(n > 0.0) {
            return Err(Error::DegenerateChannel("rank-deficient Gaussian draw"));
        }
        for x in u.col_mut(j) {
            *x /= n;
        }
    }
    Ok(u)
}

fn split_cols(u: &mut CMatrix, k: usize, j: usize) -> (Vec<C64>, &mut [C64]) {
    let head = u.col(k).to_vec();
    (head, u.col_mut(j))
}

/// MMSE estimate of `h_eff` from orthogonal DL pilots with energy
/// `np rho / B'` per antenna:
/// `h_hat = sqrt(Ep)/(1 + Ep) (sqrt(Ep) h + z)`.
pub fn dl_pilot_estimate(h_eff: &[C64], np_dl: usize, rho_dl: f64, rng: &mut RngStream) -> Result<Vec<C64>> {
    let mut z = alloc::vec![C64::new(0.0, 0.0); h_eff.len()];
    rng.fill_complex_gaussian(&mut z, 1.0);
    dl_pilot_estimate_with_noise(h_eff, np_dl, rho_dl, &z)
}

/// [`dl_pilot_estimate`] with explicit pilot noise.
pub fn dl_pilot_estimate_with_noise(h_eff: &[C64], np_dl: usize, rho_dl: f64, z: &[C64]) -> Result<Vec<C64>> {
    let b_prime = h_eff.len();
    if b_prime == 0 || np_dl < b_prime {
        return Err(Error::invalid(alloc::format!(
            "need np >= B' >= 1 (np = {np_dl}, B' = {b_prime})"
        )));
    }
    if !(rho_dl >= 0.0 && rho_dl.is_finite()) {
        return Err(Error::invalid("DL power must be finite and >= 0"));
    }
    assert_eq!(z.len(), b_prime);
    let ep = np_dl as f64 * rho_dl / b_prime as f64;
    let root = Float::sqrt(ep);
    let scale = root / (1.0 + ep);
    Ok(h_eff.iter().zip(z).map(|(h, z)| (h * root + z) * scale).collect())
}

/// One BS-initiated DL realization with a fresh antenna map.
pub fn bsdl_sample(cfg: &BsDlConfig, code: &OstbcCode, rng: &mut RngStream) -> Result<ScalarChannelSample> {
    cfg.check(code)?;
    let h = CMatrix::gaussian(cfg.base.antennas, 1, 1.0, rng);
    let u = reduce_matrix(cfg.base.antennas, cfg.b_prime, rng)?;
    transmit(cfg, code, &u, h.col(0), rng)
}

/// Same as [`bsdl_sample`] with a given antenna map `u`.
pub fn bsdl_sample_with_reduction(
    cfg: &BsDlConfig,
    code: &OstbcCode,
    u: &CMatrix,
    rng: &mut RngStream,
) -> Result<ScalarChannelSample> {
    cfg.check(code)?;
    if (u.rows(), u.cols()) != (cfg.base.antennas, cfg.b_prime) {
        return Err(Error::invalid("antenna map has the wrong shape"));
    }
    let h = CMatrix::gaussian(cfg.base.antennas, 1, 1.0, rng);
    transmit(cfg, code, u, h.col(0), rng)
}

fn transmit(
    cfg: &BsDlConfig,
    code: &OstbcCode,
    u: &CMatrix,
    h: &[C64],
    rng: &mut RngStream,
) -> Result<ScalarChannelSample> {
    let rho = cfg.base.rho_dl();
    let h_eff = u.transpose_mul_vec(h);
    let h_hat = dl_pilot_estimate(&h_eff, cfg.np_dl, rho, rng)?;
    let g_hat = norm(&h_hat);
    if !(g_hat > 0.0) {
        return Err(Error::DegenerateChannel("zero effective channel estimate"));
    }
    let power = code.symbol_power(rho);
    let (ns, nc) = (code.ns(), code.nc());
    let nd = ns * cfg.ell;
    let mut t = alloc::vec![C64::new(0.0, 0.0); nd];
    let mut v = alloc::vec![C64::new(0.0, 0.0); nd];
    let mut y = alloc::vec![C64::new(0.0, 0.0); nc];
    for k in 0..cfg.ell {
        let q = &mut t[k * ns..(k + 1) * ns];
        rng.fill_complex_gaussian(q, power);
        rng.fill_complex_gaussian(&mut y, 1.0);
        for e in code.entries() {
            let s = if e.conj { q[e.symbol].conj() } else { q[e.symbol] };
            y[e.col] += h_eff[e.row] * s * e.sign;
        }
        symbol_estimates_into(&y, &h_hat, code, &mut v[k * ns..(k + 1) * ns])?;
    }
    Ok(ScalarChannelSample {
        g: dot_conj(&h_hat, &h_eff) / g_hat,
        g_hat: C64::new(g_hat, 0.0),
        t,
        v,
        rho: power,
    })
}

/// BS-initiated DL sample source. The antenna map is drawn once, from the
/// reserved stream [`REDUCTION_STREAM`] of the master seed, and shared by all
/// samples; `h_eff` stays i.i.d. CN(0, 1) either way.
#[derive(Debug, Clone)]
pub struct OstbcSource {
    cfg: BsDlConfig,
    code: OstbcCode,
    u: CMatrix,
}

impl OstbcSource {
    pub fn new(cfg: BsDlConfig, code: OstbcCode, master_seed: u64) -> Result<Self> {
        cfg.check(&code)?;
        let mut rng = RngStream::new(master_seed, REDUCTION_STREAM);
        let u = reduce_matrix(cfg.base.antennas, cfg.b_prime, &mut rng)?;
        Ok(Self { cfg, code, u })
    }

    pub fn config(&self) -> &BsDlConfig {
        &self.cfg
    }

    pub fn code(&self) -> &OstbcCode {
        &self.code
    }
}

impl SampleSource for OstbcSource {
    fn draw(&self, rng: &mut RngStream) -> Result<ScalarChannelSample> {
        let h = CMatrix::gaussian(self.cfg.base.antennas, 1, 1.0, rng);
        transmit(&self.cfg, &self.code, &self.u, h.col(0), rng)
    }

    fn blocklength(&self) -> usize {
        self.cfg.nd(&self.code)
    }
}
