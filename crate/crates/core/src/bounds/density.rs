use num_traits::Float;

use crate::channel::{SampleSource, ScalarChannelSample};
use crate::numerics::{norm_sqr, RngStream};
use crate::{Error, Result, C64};

/// The per-sample quantities both random-coding bounds depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodingStats {
    /// `||v - g_hat t||^2`, metric of the transmitted codeword.
    pub mismatch: f64,
    /// `||v||^2`.
    pub energy: f64,
    /// `rho |g_hat|^2`.
    pub snr_gain: f64,
    /// Effective blocklength.
    pub nd: u32,
}

impl DecodingStats {
    pub fn from_sample(sample: &ScalarChannelSample) -> Self {
        let mismatch = sample
            .v
            .iter()
            .zip(&sample.t)
            .map(|(v, t)| (v - sample.g_hat * t).norm_sqr())
            .sum();
        Self {
            mismatch,
            energy: norm_sqr(&sample.v),
            snr_gain: sample.rho * sample.g_hat.norm_sqr(),
            nd: sample.nd() as u32,
        }
    }

    /// Generalized information density
    /// `i_s = -s ||v - g_hat t||^2 + s ||v||^2 / (1 + s rho |g_hat|^2) + nd ln(1 + s rho |g_hat|^2)`.
    ///
    /// `s > 0` is the caller's responsibility.
    #[inline]
    pub fn info_density(&self, s: f64) -> f64 {
        let sc = s * self.snr_gain;
        -s * self.mismatch + s * self.energy / (1.0 + sc) + self.nd as f64 * Float::ln_1p(sc)
    }
}

impl From<&ScalarChannelSample> for DecodingStats {
    fn from(sample: &ScalarChannelSample) -> Self {
        Self::from_sample(sample)
    }
}

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0) || s.is_infinite() {
        return Err(Error::invalid("Chernoff parameter s must be finite and > 0"));
    }
    Ok(())
}

/// `ln E[exp(-s ||v - g_hat t_bar||^2)]` over `t_bar ~ CN(0, rho I)`, in closed
/// form: `-s ||v||^2 / (1 + s rho |g_hat|^2) - nd ln(1 + s rho |g_hat|^2)`.
pub fn log_gaussian_denominator(s: f64, g_hat: C64, rho: f64, v: &[C64]) -> Result<f64> {
    check_s(s)?;
    if !(rho >= 0.0) {
        return Err(Error::invalid("codebook power must be >= 0"));
    }
    let sc = s * rho * g_hat.norm_sqr();
    Ok(-s * norm_sqr(v) / (1.0 + sc) - v.len() as f64 * Float::ln_1p(sc))
}

/// Information density of one channel sample; see [`DecodingStats::info_density`].
pub fn info_density(s: f64, sample: &ScalarChannelSample) -> Result<f64> {
    check_s(s)?;
    Ok(DecodingStats::from_sample(sample).info_density(s))
}

/// Fixed-gain channel `v_k = gain t_k + z_k`, z ~ CN(0, `noise_var`), decoded
/// with the true gain.
#[derive(Debug, Clone, Copy)]
pub struct AwgnSource {
    pub gain: C64,
    pub rho: f64,
    pub noise_var: f64,
    pub nd: usize,
}

impl SampleSource for AwgnSource {
    fn draw(&self, rng: &mut RngStream) -> Result<ScalarChannelSample> {
        let mut t = alloc::vec::Vec::with_capacity(self.nd);
        let mut v = alloc::vec::Vec::with_capacity(self.nd);
        for _ in 0..self.nd {
            let x = rng.complex_gaussian(self.rho);
            t.push(x);
            v.push(self.gain * x + rng.complex_gaussian(self.noise_var));
        }
        Ok(ScalarChannelSample {
            g: self.gain,
            g_hat: self.gain,
            t,
            v,
            rho: self.rho,
        })
    }

    fn blocklength(&self) -> usize {
        self.nd
    }
}
