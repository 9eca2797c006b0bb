use alloc::format;

use crate::numerics::db_to_linear;
use crate::{Error, Result};

/// Which link of the bidirectional exchange is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scenario {
    /// UE-initiated uplink: UL pilots, MMSE estimate, maximum-ratio combining.
    UeInitUl,
    /// UE-initiated downlink: maximum-ratio precoding from the UL estimate,
    /// UEs decode with the mean effective gain.
    UeInitDl,
    /// BS-initiated downlink: DL pilots and an orthogonal space-time block code.
    BsInitDl,
}

/// Small-scale fading model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fading {
    #[default]
    IidRayleigh,
    /// Extension point; no sampler is implemented for it yet.
    SpatiallyCorrelated,
}

/// Scenario parameters. Noise variance is one, so powers are SNRs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// BS antennas `B`.
    pub antennas: usize,
    /// Active single-antenna UEs `U`.
    pub users: usize,
    /// Channel uses per TDD phase `n`.
    pub blocklength: usize,
    /// UL pilot symbols `n_p`.
    pub pilots: usize,
    /// `log2 M`.
    pub payload_bits: u32,
    pub rho_ul_db: f64,
    pub rho_dl_db: f64,
    pub scenario: Scenario,
    pub fading: Fading,
}

impl SystemConfig {
    /// The configuration used for the published UE-initiated results:
    /// `B = 100`, `U = 10`, `n = 288`, 30-bit payloads.
    pub fn reference(scenario: Scenario) -> Self {
        Self {
            antennas: 100,
            users: 10,
            blocklength: 288,
            pilots: 100,
            payload_bits: 30,
            rho_ul_db: 0.0,
            rho_dl_db: 0.0,
            scenario,
            fading: Fading::IidRayleigh,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.users < 1 {
            return Err(Error::invalid("U must be >= 1"));
        }
        if self.antennas < self.users {
            return Err(Error::invalid(format!(
                "B = {} must be >= U = {}",
                self.antennas, self.users
            )));
        }
        if self.payload_bits < 1 {
            return Err(Error::invalid("payload_bits must be >= 1"));
        }
        if self.blocklength < 1 {
            return Err(Error::invalid("n must be >= 1"));
        }
        if matches!(self.scenario, Scenario::UeInitUl | Scenario::UeInitDl)
            && !(self.users <= self.pilots && self.pilots < self.blocklength)
        {
            return Err(Error::invalid(format!(
                "pilots must satisfy U <= np < n (U = {}, np = {}, n = {})",
                self.users, self.pilots, self.blocklength
            )));
        }
        if self.rho_ul_db.is_nan() || self.rho_dl_db.is_nan() {
            return Err(Error::invalid("transmit powers must not be NaN"));
        }
        Ok(())
    }

    pub fn rho_ul(&self) -> f64 {
        db_to_linear(self.rho_ul_db)
    }

    pub fn rho_dl(&self) -> f64 {
        db_to_linear(self.rho_dl_db)
    }

    /// Per-entry variance of the MMSE estimate, `np rho / (1 + np rho)`.
    pub fn estimate_variance(&self) -> f64 {
        let e = self.pilots as f64 * self.rho_ul();
        e / (1.0 + e)
    }
}
