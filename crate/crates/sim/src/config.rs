//! TOML run configuration.
//!
//! ```toml
//! [scenario]
//! link = "ue-ul"        # ue-ul | ue-dl | bs-dl (min-snr, rcus-point)
//! target_eps = 1e-5
//! snr_db = 0.0          # rcus-point only
//! b_prime = 10          # bs-dl only
//!
//! [system]
//! B = 100
//! U = 10
//! n = 288
//! np = 100
//! bits = 30
//! rho_ul_db = 0.0
//! rho_dl_db = 0.0
//! fading = "iid"
//!
//! [montecarlo]
//! seed = 1
//! samples = 1000000
//! threads = 4
//!
//! [sweep]
//! np = [10, 50, 100, 150, 200, 250]
//! b_prime = [4, 8, 10, 16]
//! tol_db = 0.25
//! ```
//!
//! Every key except `system.B`, `system.U`, `system.n` and `system.bits` has a
//! default. Unknown keys are rejected.

use std::path::Path;

use fblmimo_core::bounds::SSearch;
use fblmimo_core::channel::{Fading, Scenario, SystemConfig};
use fblmimo_core::search::SnrSearch;
use serde::{Deserialize, Serialize};

use crate::experiments::{default_np_grid, McSettings, DEFAULT_B_PRIME};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field, reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkKind {
    UeUl,
    UeDl,
    BsDl,
}

impl LinkKind {
    pub fn scenario(self) -> Scenario {
        match self {
            LinkKind::UeUl => Scenario::UeInitUl,
            LinkKind::UeDl => Scenario::UeInitDl,
            LinkKind::BsDl => Scenario::BsInitDl,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FadingKind {
    Iid,
    Correlated,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub link: Option<LinkKind>,
    pub target_eps: Option<f64>,
    pub snr_db: Option<f64>,
    pub b_prime: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    #[serde(rename = "B")]
    pub b: Option<usize>,
    #[serde(rename = "U")]
    pub u: Option<usize>,
    pub n: Option<usize>,
    pub np: Option<usize>,
    pub bits: Option<u32>,
    pub rho_ul_db: Option<f64>,
    pub rho_dl_db: Option<f64>,
    pub fading: Option<FadingKind>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub threads: Option<usize>,
    pub s_grid_lo: Option<f64>,
    pub s_grid_hi: Option<f64>,
    pub s_grid_points: Option<usize>,
    pub s_rel_width: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub np: Option<Vec<usize>>,
    pub b_prime: Option<Vec<usize>>,
    pub snr_lo_db: Option<f64>,
    pub snr_hi_db: Option<f64>,
    pub tol_db: Option<f64>,
    pub widen_db: Option<f64>,
}

/// Bookkeeping written into manifests; ignored on input.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestSection {
    pub command: Option<String>,
    pub code_version: Option<String>,
    pub wall_time_s: Option<f64>,
}

/// The file as written; after [`RawConfig::resolve`] every field is `Some`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub montecarlo: MonteCarloSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<ManifestSection>,
}

pub const SMOKE_SAMPLES: u64 = 100_000;
pub const STANDARD_SAMPLES: u64 = 1_000_000;
pub const PAPER_FIDELITY_SAMPLES: u64 = 10_000_000;

/// Fully validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub link: LinkKind,
    pub target_eps: f64,
    pub snr_db: f64,
    pub b_prime: usize,
    pub system: SystemConfig,
    pub threads: Option<usize>,
    pub mc: McSettings,
    pub np_list: Vec<usize>,
    pub b_prime_list: Vec<usize>,
    pub search: SnrSearch,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            ConfigError::Parse(m) => ConfigError::Parse(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    /// Fills defaults and checks every constraint.
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let sys = &self.system;
        let b = sys.b.ok_or_else(|| invalid("system.B", "missing required field"))?;
        let u = sys.u.ok_or_else(|| invalid("system.U", "missing required field"))?;
        let n = sys.n.ok_or_else(|| invalid("system.n", "missing required field"))?;
        let bits = sys.bits.ok_or_else(|| invalid("system.bits", "missing required field"))?;
        if u < 1 {
            return Err(invalid("system.U", "must be >= 1"));
        }
        if b < u {
            return Err(invalid("system.B", format!("must be >= U = {u}")));
        }
        if n < 1 {
            return Err(invalid("system.n", "must be >= 1"));
        }
        if bits < 1 {
            return Err(invalid("system.bits", "must be >= 1"));
        }
        let link = self.scenario.link.unwrap_or(LinkKind::UeUl);
        let np = sys.np.unwrap_or(if link == LinkKind::BsDl { 96.min(n - 1) } else { u.max(100.min(n - 1)) });
        if np >= n {
            return Err(invalid("system.np", format!("must satisfy np < n = {n}, got {np}")));
        }
        if link != LinkKind::BsDl && np < u {
            return Err(invalid("system.np", format!("must satisfy np >= U = {u}, got {np}")));
        }
        let fading = match sys.fading.unwrap_or(FadingKind::Iid) {
            FadingKind::Iid => Fading::IidRayleigh,
            FadingKind::Correlated => Fading::SpatiallyCorrelated,
        };
        let finite = |field, v: f64| {
            if v.is_finite() { Ok(v) } else { Err(invalid(field, "must be finite")) }
        };
        let system = SystemConfig {
            antennas: b,
            users: u,
            blocklength: n,
            pilots: np,
            payload_bits: bits,
            rho_ul_db: finite("system.rho_ul_db", sys.rho_ul_db.unwrap_or(0.0))?,
            rho_dl_db: finite("system.rho_dl_db", sys.rho_dl_db.unwrap_or(0.0))?,
            scenario: link.scenario(),
            fading,
        };

        let target_eps = self.scenario.target_eps.unwrap_or(1e-5);
        if !(target_eps > 0.0 && target_eps < 1.0) {
            return Err(invalid("scenario.target_eps", "must lie in (0, 1)"));
        }
        let b_prime = self.scenario.b_prime.unwrap_or(10.min(b));
        if !(2..=b).contains(&b_prime) {
            return Err(invalid("scenario.b_prime", format!("must lie in [2, B = {b}]")));
        }

        let mcs = &self.montecarlo;
        let samples = mcs.samples.unwrap_or(STANDARD_SAMPLES);
        if samples < fblmimo_core::bounds::MIN_SAMPLES {
            return Err(invalid(
                "montecarlo.samples",
                format!("must be >= {}", fblmimo_core::bounds::MIN_SAMPLES),
            ));
        }
        if mcs.threads == Some(0) {
            return Err(invalid("montecarlo.threads", "must be >= 1"));
        }
        let d = SSearch::default();
        let s_search = SSearch {
            grid_lo: mcs.s_grid_lo.unwrap_or(d.grid_lo),
            grid_hi: mcs.s_grid_hi.unwrap_or(d.grid_hi),
            grid_points: mcs.s_grid_points.unwrap_or(d.grid_points),
            rel_width: mcs.s_rel_width.unwrap_or(d.rel_width),
        };
        if !(s_search.grid_lo > 0.0 && s_search.grid_hi > s_search.grid_lo) {
            return Err(invalid("montecarlo.s_grid_lo", "need 0 < s_grid_lo < s_grid_hi"));
        }
        if s_search.grid_points < 2 {
            return Err(invalid("montecarlo.s_grid_points", "must be >= 2"));
        }
        if !(s_search.rel_width > 0.0) {
            return Err(invalid("montecarlo.s_rel_width", "must be > 0"));
        }

        let sw = &self.sweep;
        let np_list = sw.np.clone().unwrap_or_else(|| default_np_grid(u, n));
        if let Some(&bad) = np_list.iter().find(|&&p| p >= n) {
            return Err(invalid("sweep.np", format!("every np must be < n = {n}, got {bad}")));
        }
        let b_prime_list = sw.b_prime.clone().unwrap_or_else(|| DEFAULT_B_PRIME.to_vec());
        if let Some(&bad) = b_prime_list.iter().find(|&&x| !(2..=b).contains(&x)) {
            return Err(invalid("sweep.b_prime", format!("every B' must lie in [2, B = {b}], got {bad}")));
        }
        let ds = SnrSearch::default();
        let search = SnrSearch {
            lo_db: sw.snr_lo_db.unwrap_or(ds.lo_db),
            hi_db: sw.snr_hi_db.unwrap_or(ds.hi_db),
            tol_db: sw.tol_db.unwrap_or(ds.tol_db),
            widen_db: sw.widen_db.unwrap_or(ds.widen_db),
            max_iterations: ds.max_iterations,
        };
        if !(search.hi_db > search.lo_db) {
            return Err(invalid("sweep.snr_hi_db", "must exceed sweep.snr_lo_db"));
        }
        if !(search.tol_db > 0.0) {
            return Err(invalid("sweep.tol_db", "must be > 0"));
        }
        if !(search.widen_db >= 0.0) {
            return Err(invalid("sweep.widen_db", "must be >= 0"));
        }

        Ok(RunConfig {
            link,
            target_eps,
            snr_db: finite("scenario.snr_db", self.scenario.snr_db.unwrap_or(0.0))?,
            b_prime,
            system,
            threads: mcs.threads,
            mc: McSettings {
                master_seed: mcs.seed.unwrap_or(1),
                n_samples: samples,
                s_search,
            },
            np_list,
            b_prime_list,
            search,
        })
    }
}

impl RunConfig {
    /// The resolved configuration in file form, every default written out.
    pub fn to_raw(&self) -> RawConfig {
        let s = &self.system;
        RawConfig {
            scenario: ScenarioSection {
                link: Some(self.link),
                target_eps: Some(self.target_eps),
                snr_db: Some(self.snr_db),
                b_prime: Some(self.b_prime),
            },
            system: SystemSection {
                b: Some(s.antennas),
                u: Some(s.users),
                n: Some(s.blocklength),
                np: Some(s.pilots),
                bits: Some(s.payload_bits),
                rho_ul_db: Some(s.rho_ul_db),
                rho_dl_db: Some(s.rho_dl_db),
                fading: Some(match s.fading {
                    Fading::IidRayleigh => FadingKind::Iid,
                    Fading::SpatiallyCorrelated => FadingKind::Correlated,
                }),
            },
            montecarlo: MonteCarloSection {
                seed: Some(self.mc.master_seed),
                samples: Some(self.mc.n_samples),
                threads: self.threads,
                s_grid_lo: Some(self.mc.s_search.grid_lo),
                s_grid_hi: Some(self.mc.s_search.grid_hi),
                s_grid_points: Some(self.mc.s_search.grid_points),
                s_rel_width: Some(self.mc.s_search.rel_width),
            },
            sweep: SweepSection {
                np: Some(self.np_list.clone()),
                b_prime: Some(self.b_prime_list.clone()),
                snr_lo_db: Some(self.search.lo_db),
                snr_hi_db: Some(self.search.hi_db),
                tol_db: Some(self.search.tol_db),
                widen_db: Some(self.search.widen_db),
            },
            manifest: None,
        }
    }
}

pub fn to_toml(raw: &RawConfig) -> String {
    toml::to_string(raw).expect("config is always representable as TOML")
}
