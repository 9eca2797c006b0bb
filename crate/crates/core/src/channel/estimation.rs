use num_traits::Float;
use super::{Fading, SystemConfig};
use crate::numerics::{CMatrix, RngStream};
use crate::{Error, Result};

/// True channel, its MMSE estimate and the per-entry estimate variance.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingBlock {
    pub h: CMatrix,
    pub h_hat: CMatrix,
    pub sigma2_hat: f64,
}

/// Draws the `B x U` fading matrix.
pub fn sample_fading(cfg: &SystemConfig, rng: &mut RngStream) -> Result<CMatrix> {
    match cfg.fading {
        Fading::IidRayleigh => Ok(CMatrix::gaussian(cfg.antennas, cfg.users, 1.0, rng)),
        Fading::SpatiallyCorrelated => {
            Err(Error::NotImplemented("spatially correlated fading sampler"))
        }
    }
}

/// MMSE estimate from `pilots` orthogonal pilot symbols of power `rho`:
/// `H_hat = sqrt(np rho)/(1 + np rho) (sqrt(np rho) H + Z)` with Z ~ CN(0, 1).
pub fn mmse_estimate(
    h: &CMatrix,
    pilots: usize,
    rho: f64,
    rng: &mut RngStream,
) -> Result<FadingBlock> {
    check_pilots(h, pilots, rho)?;
    let z = CMatrix::gaussian(h.rows(), h.cols(), 1.0, rng);
    mmse_estimate_with_noise(h, pilots, rho, &z)
}

/// [`mmse_estimate`] with an explicit pilot-noise matrix.
pub fn mmse_estimate_with_noise(
    h: &CMatrix,
    pilots: usize,
    rho: f64,
    z: &CMatrix,
) -> Result<FadingBlock> {
    check_pilots(h, pilots, rho)?;
    assert_eq!((h.rows(), h.cols()), (z.rows(), z.cols()));
    let energy = pilots as f64 * rho;
    let root = Float::sqrt(energy);
    let scale = root / (1.0 + energy);
    let mut h_hat = CMatrix::zeros(h.rows(), h.cols());
    for j in 0..h.cols() {
        for ((e, h), z) in h_hat.col_mut(j).iter_mut().zip(h.col(j)).zip(z.col(j)) {
            *e = (h * root + z) * scale;
        }
    }
    Ok(FadingBlock {
        h: h.clone(),
        h_hat,
        sigma2_hat: energy / (1.0 + energy),
    })
}

fn check_pilots(h: &CMatrix, pilots: usize, rho: f64) -> Result<()> {
    if pilots < h.cols() {
        return Err(Error::invalid(alloc::format!(
            "np = {pilots} is smaller than U = {}; no orthogonal pilots",
            h.cols()
        )));
    }
    if !(rho >= 0.0) || rho.is_infinite() {
        return Err(Error::invalid("pilot power must be finite and >= 0"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Scenario;
    use crate::numerics::McAccumulator;

    #[test]
    fn fading_shape_and_determinism() {
        let mut cfg = SystemConfig::reference(Scenario::UeInitUl);
        cfg.antennas = 2;
        cfg.users = 3;
        let a = sample_fading(&cfg, &mut RngStream::new(1, 1)).unwrap();
        let b = sample_fading(&cfg, &mut RngStream::new(1, 1)).unwrap();
        assert_eq!((a.rows(), a.cols()), (2, 3));
        assert_eq!(a, b);
    }

    #[test]
    fn scalar_fading_second_moment() {
        let mut cfg = SystemConfig::reference(Scenario::UeInitUl);
        cfg.antennas = 1;
        cfg.users = 1;
        let mut rng = RngStream::new(2, 0);
        let acc: McAccumulator = (0..1_000_000)
            .map(|_| sample_fading(&cfg, &mut rng).unwrap()[(0, 0)].norm_sqr())
            .collect();
        assert!((0.995..=1.005).contains(&acc.mean()), "{}", acc.mean());
    }

    #[test]
    fn correlated_fading_is_not_implemented() {
        let mut cfg = SystemConfig::reference(Scenario::UeInitUl);
        cfg.fading = Fading::SpatiallyCorrelated;
        assert!(matches!(
            sample_fading(&cfg, &mut RngStream::new(0, 0)),
            Err(Error::NotImplemented(_))
        ));
    }

    #[test]
    fn zero_power_gives_zero_estimate() {
        let mut rng = RngStream::new(3, 0);
        let h = CMatrix::gaussian(4, 2, 1.0, &mut rng);
        let block = mmse_estimate(&h, 4, 0.0, &mut rng).unwrap();
        assert!(block.h_hat.as_slice().iter().all(|z| z.norm() == 0.0));
        assert_eq!(block.sigma2_hat, 0.0);
    }

    #[test]
    fn noiseless_high_energy_estimate_is_exact() {
        let mut rng = RngStream::new(3, 1);
        let h = CMatrix::gaussian(6, 3, 1.0, &mut rng);
        let z = CMatrix::zeros(6, 3);
        // np * rho = 1e12
        let block = mmse_estimate_with_noise(&h, 10, 1e11, &z).unwrap();
        for (a, b) in block.h_hat.as_slice().iter().zip(h.as_slice()) {
            assert!((a - b).norm() <= 1e-6 * b.norm());
        }
    }

    #[test]
    fn too_few_pilots() {
        let h = CMatrix::zeros(4, 3);
        assert!(matches!(
            mmse_estimate(&h, 2, 1.0, &mut RngStream::new(0, 0)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn estimate_variance_np10_rho1() {
        let mut rng = RngStream::new(4, 0);
        let mut acc = McAccumulator::new();
        for _ in 0..100_000 {
            let h = CMatrix::gaussian(1, 1, 1.0, &mut rng);
            let block = mmse_estimate(&h, 10, 1.0, &mut rng).unwrap();
            acc.push(block.h_hat[(0, 0)].norm_sqr());
        }
        let expect = 10.0 / 11.0;
        assert!(
            (acc.mean() - expect).abs() <= 3.0 * acc.std_error(),
            "{} vs {expect} (se {})",
            acc.mean(),
            acc.std_error()
        );
    }
}
