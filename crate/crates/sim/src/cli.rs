//! Command-line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use fblmimo_core::channel::Scenario;
use fblmimo_core::search::bidir_budget;
use fblmimo_core::Error;

use crate::config::{ConfigError, LinkKind, RawConfig, RunConfig, PAPER_FIDELITY_SAMPLES};
use crate::experiments::{self, Link, RowKind, SweepRow};
use crate::output::{self, OutputError};
use crate::{mc, validate};

/// Environment variable that overrides the worker thread count.
pub const THREADS_ENV: &str = "FBLMIMO_THREADS";

#[derive(Debug, Parser)]
#[command(name = "fblmimo", version, about = "Finite-blocklength bounds for short-packet massive MIMO")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML configuration; without it the B = 100, U = 10, n = 288, 30-bit setup is used.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Monte-Carlo samples per bound evaluation.
    #[arg(long, global = true, conflicts_with = "paper_fidelity")]
    pub samples: Option<u64>,

    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output CSV; the manifest goes next to it with a .toml extension.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Use 10^7 samples per bound evaluation.
    #[arg(long, global = true)]
    pub paper_fidelity: bool,

    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Uplink minimum SNR over the pilot grid.
    UeUlSweep,
    /// Downlink minimum SNR over the pilot grid at the configured UL power.
    UeDlSweep,
    /// UL and DL minimum SNR with the error target split equally, plus their dB-sum.
    UeBidir,
    /// BS-initiated downlink over the B' and pilot grids.
    BsOstbcSweep,
    /// Minimum SNR of the configured link.
    MinSnr,
    /// Run the built-in consistency checks.
    Validate,
    /// RCUS bound at the configured SNR.
    RcusPoint,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::UeUlSweep => "ue-ul-sweep",
            Command::UeDlSweep => "ue-dl-sweep",
            Command::UeBidir => "ue-bidir",
            Command::BsOstbcSweep => "bs-ostbc-sweep",
            Command::MinSnr => "min-snr",
            Command::Validate => "validate",
            Command::RcusPoint => "rcus-point",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error(transparent)]
    Output(#[from] OutputError),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Core(Error::InvalidArgument(_) | Error::NotImplemented(_)) => 2,
            RunError::Core(_) => 3,
            RunError::Output(_) => 1,
        }
    }
}

const DEFAULT_CONFIG: &str = "[system]\nB = 100\nU = 10\nn = 288\nbits = 30\n";

/// Loads the config and applies command-line and environment overrides.
pub fn resolve(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut raw = match &cli.config {
        Some(p) => RawConfig::load(p)?,
        None => RawConfig::parse(DEFAULT_CONFIG)?,
    };
    if let Some(seed) = cli.seed {
        raw.montecarlo.seed = Some(seed);
    }
    if let Some(n) = cli.samples {
        raw.montecarlo.samples = Some(n);
    }
    if cli.paper_fidelity {
        raw.montecarlo.samples = Some(PAPER_FIDELITY_SAMPLES);
    }
    match cli.threads {
        Some(t) => raw.montecarlo.threads = Some(t),
        None => {
            if let Ok(v) = std::env::var(THREADS_ENV) {
                let t = v.trim().parse().map_err(|_| ConfigError::Invalid {
                    field: "FBLMIMO_THREADS",
                    reason: format!("not a thread count: {v:?}"),
                })?;
                raw.montecarlo.threads = Some(t);
            }
        }
    }
    raw.resolve()
}

fn with_link(cfg: &RunConfig, scenario: Scenario) -> fblmimo_core::channel::SystemConfig {
    let mut s = cfg.system;
    s.scenario = scenario;
    s
}

/// Runs one command and returns its rows.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<Vec<SweepRow>, RunError> {
    let mcs = &cfg.mc;
    let rows = match command {
        Command::UeUlSweep => experiments::pilot_sweep_single(
            &with_link(cfg, Scenario::UeInitUl),
            &cfg.np_list,
            cfg.target_eps,
            &cfg.search,
            mcs,
        )?,
        Command::UeDlSweep => experiments::pilot_sweep_single(
            &with_link(cfg, Scenario::UeInitDl),
            &cfg.np_list,
            cfg.target_eps,
            &cfg.search,
            mcs,
        )?,
        Command::UeBidir => {
            let (ul, dl) = bidir_budget(cfg.target_eps)?;
            experiments::pilot_sweep_ue_init(&cfg.system, &cfg.np_list, ul, dl, &cfg.search, mcs)?
        }
        Command::BsOstbcSweep => experiments::ostbc_sweep_bs_init(
            &cfg.system,
            &cfg.b_prime_list,
            &cfg.np_list,
            cfg.target_eps,
            &cfg.search,
            mcs,
        )?,
        Command::MinSnr | Command::RcusPoint => {
            let (link, b_prime) = match cfg.link {
                LinkKind::BsDl => (Link::BsInit { b_prime: cfg.b_prime }, cfg.b_prime),
                _ => (Link::UeInit, 0),
            };
            let sys = &cfg.system;
            let (snr_db, est, converged) = if command == Command::MinSnr {
                let r = experiments::min_snr_for(sys, link, cfg.target_eps, &cfg.search, mcs)?;
                (r.min_snr_db, r.estimate, r.converged)
            } else {
                let mut s = *sys;
                match sys.scenario {
                    Scenario::UeInitUl => s.rho_ul_db = cfg.snr_db,
                    _ => s.rho_dl_db = cfg.snr_db,
                }
                (cfg.snr_db, experiments::rcus_point(&s, link, mcs)?, true)
            };
            vec![SweepRow {
                scenario: RowKind::of(sys.scenario),
                b: sys.antennas,
                u: sys.users,
                b_prime,
                n: sys.blocklength,
                np: sys.pilots,
                snr_db,
                s_star: est.s_star,
                epsilon: est.epsilon,
                ci95: est.ci95(),
                n_samples: est.n_samples,
                master_seed: mcs.master_seed,
                converged,
            }]
        }
        Command::Validate => Vec::new(),
    };
    Ok(rows)
}

fn run_validate(threads: Option<usize>) -> Result<bool, RunError> {
    let checks = mc::with_threads(threads, validate::run_all)?;
    let mut ok = true;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        ok &= c.passed;
    }
    Ok(ok)
}

fn run(cli: &Cli) -> Result<ExitCode, RunError> {
    let cfg = resolve(cli)?;
    if cli.command == Command::Validate {
        return Ok(if run_validate(cfg.threads)? { ExitCode::SUCCESS } else { ExitCode::from(4) });
    }
    let started = Instant::now();
    let rows = mc::with_threads(cfg.threads, || execute(cli.command, &cfg))?;
    let wall = started.elapsed().as_secs_f64();
    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cli.command.name())));
    output::emit_csv(&rows, &out)?;
    let manifest = output::emit_manifest(&cfg, cli.command.name(), wall, &out)?;
    report(&rows, &out, &manifest);
    if rows.iter().all(|r| r.converged) {
        Ok(ExitCode::SUCCESS)
    } else {
        log::error!("some searches did not converge within the sample budget");
        Ok(ExitCode::from(4))
    }
}

fn report(rows: &[SweepRow], csv: &Path, manifest: &Path) {
    for r in output::sorted(rows) {
        println!(
            "{:<15} B'={:<3} np={:<4} snr={:>8.3} dB  eps={:.3e} +- {:.1e}{}",
            r.scenario.as_str(),
            r.b_prime,
            r.np,
            r.snr_db,
            r.epsilon,
            r.ci95,
            if r.converged { "" } else { "  (not converged)" }
        );
    }
    println!("wrote {} and {}", csv.display(), manifest.display());
}

/// Parses the process arguments, runs and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
