use num_traits::Float;
use alloc::vec::Vec;


use super::{mmse_estimate, sample_fading, SampleSource, ScalarChannelSample, Scenario, SystemConfig};
use crate::numerics::{dot, dot_conj, norm, norm_sqr, CMatrix, McAccumulator, RngStream};
use crate::{Error, Result, C64};

/// Unit-norm maximum-ratio combiner: column `u` is `h_hat_u / ||h_hat_u||`.
pub fn mrc_combiner(h_hat: &CMatrix) -> Result<CMatrix> {
    let mut w = h_hat.clone();
    for j in 0..w.cols() {
        let n = norm(w.col(j));
        if !(n > 0.0) {
            return Err(Error::DegenerateChannel("all-zero column in channel estimate"));
        }
        for z in w.col_mut(j) {
            *z /= n;
        }
    }
    Ok(w)
}

/// Maximum-ratio precoder `p_u = conj(h_hat_u) / sqrt(B sigma2_hat)`, which
/// makes `E ||p_u||^2 = 1`.
pub fn mrt_precoder(h_hat: &CMatrix, sigma2_hat: f64) -> Result<CMatrix> {
    if !(sigma2_hat > 0.0) {
        return Err(Error::invalid("estimate variance must be > 0 for precoding"));
    }
    let scale = 1.0 / Float::sqrt(h_hat.rows() as f64 * sigma2_hat);
    let mut p = h_hat.clone();
    for j in 0..p.cols() {
        for z in p.col_mut(j) {
            *z = z.conj() * scale;
        }
    }
    Ok(p)
}

/// Closed form of `E[h_u^T p_u]` under [`mrt_precoder`]: `sqrt(B sigma2_hat)`.
pub fn dl_gain_estimate(cfg: &SystemConfig) -> f64 {
    Float::sqrt(cfg.antennas as f64 * cfg.estimate_variance())
}

/// Monte-Carlo average of `Re(h_u^T p_u)` over `draws` fading/estimation
/// realizations; the cross-check for [`dl_gain_estimate`].
pub fn dl_gain_estimate_mc(
    cfg: &SystemConfig,
    user: usize,
    draws: u64,
    master_seed: u64,
) -> Result<McAccumulator> {
    let mut acc = McAccumulator::new();
    for i in 0..draws {
        let mut rng = RngStream::new(master_seed, i);
        let h = sample_fading(cfg, &mut rng)?;
        let block = mmse_estimate(&h, cfg.pilots, cfg.rho_ul(), &mut rng)?;
        let p = mrt_precoder(&block.h_hat, block.sigma2_hat)?;
        acc.push(dot(h.col(user), p.col(user)).re);
    }
    Ok(acc)
}

fn check_user(cfg: &SystemConfig, user: usize) -> Result<()> {
    if user >= cfg.users {
        return Err(Error::invalid(alloc::format!(
            "user index {user} out of range for U = {}",
            cfg.users
        )));
    }
    Ok(())
}

/// Uplink after maximum-ratio combining for `user`, in the scalar form.
///
/// Interfering users' data symbols are drawn explicitly. The combined receiver
/// noise `w_u^H z_k` is drawn directly as CN(0, ||w_u||^2), which is its exact
/// law given the combiner.
pub fn ul_sample(
    cfg: &SystemConfig,
    user: usize,
    rng: &mut RngStream,
) -> Result<ScalarChannelSample> {
    if cfg.scenario != Scenario::UeInitUl {
        return Err(Error::invalid("ul_sample needs the UE-initiated UL scenario"));
    }
    cfg.validate()?;
    check_user(cfg, user)?;
    let rho = cfg.rho_ul();
    let h = sample_fading(cfg, rng)?;
    let block = mmse_estimate(&h, cfg.pilots, rho, rng)?;
    let w = mrc_combiner(&block.h_hat)?;
    let wu = w.col(user);
    let g = dot_conj(wu, h.col(user));
    let g_hat = dot_conj(wu, block.h_hat.col(user));
    let coupling: Vec<C64> = (0..cfg.users).map(|k| dot_conj(wu, h.col(k))).collect();
    let noise_var = norm_sqr(wu);
    Ok(mix(
        cfg.blocklength - cfg.pilots,
        user,
        &coupling,
        rho,
        noise_var,
        g,
        g_hat,
        rng,
    ))
}

/// Downlink with maximum-ratio precoding, decoded with the hardening-based
/// gain [`dl_gain_estimate`].
pub fn dl_sample(
    cfg: &SystemConfig,
    user: usize,
    rng: &mut RngStream,
) -> Result<ScalarChannelSample> {
    if cfg.scenario != Scenario::UeInitDl {
        return Err(Error::invalid("dl_sample needs the UE-initiated DL scenario"));
    }
    cfg.validate()?;
    check_user(cfg, user)?;
    let h = sample_fading(cfg, rng)?;
    let block = mmse_estimate(&h, cfg.pilots, cfg.rho_ul(), rng)?;
    let p = mrt_precoder(&block.h_hat, block.sigma2_hat)?;
    let hu = h.col(user);
    let coupling: Vec<C64> = (0..cfg.users).map(|k| dot(hu, p.col(k))).collect();
    let g = coupling[user];
    let g_hat = C64::new(dl_gain_estimate(cfg), 0.0);
    Ok(mix(
        cfg.blocklength,
        user,
        &coupling,
        cfg.rho_dl(),
        1.0,
        g,
        g_hat,
        rng,
    ))
}

/// `v_k = sum_j coupling[j] x_k[j] + noise`, with `t_k = x_k[user]`.
#[allow(clippy::too_many_arguments)]
fn mix(
    nd: usize,
    user: usize,
    coupling: &[C64],
    rho: f64,
    noise_var: f64,
    g: C64,
    g_hat: C64,
    rng: &mut RngStream,
) -> ScalarChannelSample {
    let mut t = Vec::with_capacity(nd);
    let mut v = Vec::with_capacity(nd);
    for _ in 0..nd {
        let mut acc = C64::new(0.0, 0.0);
        let mut own = C64::new(0.0, 0.0);
        for (j, c) in coupling.iter().enumerate() {
            let x = rng.complex_gaussian(rho);
            if j == user {
                own = x;
            }
            acc += c * x;
        }
        acc += rng.complex_gaussian(noise_var);
        t.push(own);
        v.push(acc);
    }
    ScalarChannelSample {
        g,
        g_hat,
        t,
        v,
        rho,
    }
}

/// Uplink sample source for a fixed user.
#[derive(Debug, Clone)]
pub struct UplinkSource {
    cfg: SystemConfig,
    user: usize,
}

impl UplinkSource {
    pub fn new(cfg: SystemConfig, user: usize) -> Result<Self> {
        if cfg.scenario != Scenario::UeInitUl {
            return Err(Error::invalid("uplink source needs the UE-initiated UL scenario"));
        }
        cfg.validate()?;
        check_user(&cfg, user)?;
        Ok(Self { cfg, user })
    }
}

impl SampleSource for UplinkSource {
    fn draw(&self, rng: &mut RngStream) -> Result<ScalarChannelSample> {
        ul_sample(&self.cfg, self.user, rng)
    }

    fn blocklength(&self) -> usize {
        self.cfg.blocklength - self.cfg.pilots
    }
}

/// Downlink sample source for a fixed user.
#[derive(Debug, Clone)]
pub struct DownlinkSource {
    cfg: SystemConfig,
    user: usize,
}

impl DownlinkSource {
    pub fn new(cfg: SystemConfig, user: usize) -> Result<Self> {
        if cfg.scenario != Scenario::UeInitDl {
            return Err(Error::invalid("downlink source needs the UE-initiated DL scenario"));
        }
        cfg.validate()?;
        check_user(&cfg, user)?;
        if !(cfg.estimate_variance() > 0.0) {
            return Err(Error::invalid("downlink precoding needs a nonzero UL pilot power"));
        }
        Ok(Self { cfg, user })
    }
}

impl SampleSource for DownlinkSource {
    fn draw(&self, rng: &mut RngStream) -> Result<ScalarChannelSample> {
        dl_sample(&self.cfg, self.user, rng)
    }

    fn blocklength(&self) -> usize {
        self.cfg.blocklength
    }
}
