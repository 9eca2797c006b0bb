//! Quick self-checks behind `fblmimo validate`.

use fblmimo_core::bounds::{log_gaussian_denominator, marcum, MessageCount, SSearch};
use fblmimo_core::channel::{mmse_estimate, Scenario, SystemConfig, UplinkSource};
use fblmimo_core::numerics::{CMatrix, McAccumulator, RngStream};
use fblmimo_core::ostbc::{build_alamouti, build_rate34, build_tarokh_rate_half, ostbc_encode, OstbcCode};
use fblmimo_core::{Result, C64};

use crate::mc;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn ostbc_orthogonality() -> Result<Check> {
    let mut codes: Vec<OstbcCode> = vec![build_alamouti(), build_rate34()];
    for b in [3, 4, 8, 10] {
        codes.push(build_tarokh_rate_half(b)?);
    }
    let mut worst: f64 = 0.0;
    for code in &codes {
        for i in 0..100 {
            let mut rng = RngStream::new(0, i);
            let mut q = vec![C64::new(0.0, 0.0); code.ns()];
            rng.fill_complex_gaussian(&mut q, 1.0);
            let x = ostbc_encode(&q, code)?;
            let mut want = CMatrix::identity(code.b_prime());
            want.scale(q.iter().map(|z| z.norm_sqr()).sum());
            worst = worst.max(x.mul(&x.conj_transpose()).max_abs_diff(&want));
        }
    }
    Ok(check("ostbc orthogonality", worst < 1e-10, format!("max deviation {worst:.2e}")))
}

fn denominator() -> Result<Check> {
    let (s, g, rho) = (0.3, C64::new(0.8, -0.4), 1.5);
    let v = [C64::new(1.0, 0.5), C64::new(-0.7, 0.2), C64::new(0.1, 1.1)];
    let closed = log_gaussian_denominator(s, g, rho, &v)?;
    let mut acc = McAccumulator::new();
    for i in 0..100_000 {
        let mut rng = RngStream::new(1, i);
        let d: f64 = v.iter().map(|v| (v - g * rng.complex_gaussian(rho)).norm_sqr()).sum();
        acc.push((-s * d).exp());
    }
    let z = (acc.mean() - closed.exp()).abs() / acc.std_error();
    Ok(check("gaussian denominator", z < 4.0, format!("{z:.2} standard errors")))
}

fn estimator() -> Result<Check> {
    let (np, rho) = (10, 1.0);
    let mut acc = McAccumulator::new();
    for i in 0..20_000 {
        let mut rng = RngStream::new(2, i);
        let h = CMatrix::gaussian(1, 1, 1.0, &mut rng);
        let block = mmse_estimate(&h, np, rho, &mut rng)?;
        acc.push(block.h_hat[(0, 0)].norm_sqr());
    }
    let want = 10.0 / 11.0;
    let z = (acc.mean() - want).abs() / acc.std_error();
    Ok(check("mmse estimate variance", z < 4.0, format!("{z:.2} standard errors")))
}

fn ncx2() -> Check {
    let got = marcum::ln_ncx2_cdf(16, 40.0, 60.0);
    let err = (got - -1.5270826235476351).abs();
    check("noncentral chi-square cdf", err < 1e-9, format!("error {err:.2e}"))
}

fn bound_order() -> Result<Check> {
    let cfg = SystemConfig {
        antennas: 4,
        users: 2,
        blocklength: 24,
        pilots: 8,
        payload_bits: 8,
        rho_ul_db: 5.0,
        rho_dl_db: 5.0,
        scenario: Scenario::UeInitUl,
        fading: Default::default(),
    };
    let src = UplinkSource::new(cfg, 0)?;
    let m = MessageCount::from_bits(8);
    let stats = mc::collect_stats(&src, 3, 10_000)?;
    let rcu = mc::rcu_from_stats(&stats, m)?;
    let rcus = mc::rcus_from_stats(&stats, m, &SSearch::default())?;
    Ok(check(
        "rcu <= rcus",
        rcu.epsilon <= rcus.epsilon,
        format!("rcu {:.3e}, rcus {:.3e}", rcu.epsilon, rcus.epsilon),
    ))
}

pub fn run_all() -> Result<Vec<Check>> {
    Ok(vec![ostbc_orthogonality()?, denominator()?, estimator()?, ncx2(), bound_order()?])
}
