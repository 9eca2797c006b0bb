use num_traits::Float;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result, C64};

/// A reproducible random stream addressed by `(master_seed, stream_id)`.
///
/// The stream is a ChaCha8 keystream: the key is derived from `master_seed`
/// and `stream_id` selects the 64-bit ChaCha stream (nonce). Each Monte-Carlo
/// sample uses its own index as `stream_id`, so results do not depend on how
/// samples are scheduled across threads.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            inner,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// One circularly-symmetric complex Gaussian draw with `E|z|^2 = variance`.
    ///
    /// Two normals are always consumed, also for `variance == 0`, so that the
    /// stream position does not depend on powers.
    #[inline]
    pub fn complex_gaussian(&mut self, variance: f64) -> C64 {
        let scale = Float::sqrt(0.5 * variance);
        let re = self.standard_normal();
        let im = self.standard_normal();
        C64::new(scale * re, scale * im)
    }

    pub fn fill_complex_gaussian(&mut self, out: &mut [C64], variance: f64) {
        for z in out {
            *z = self.complex_gaussian(variance);
        }
    }

    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// `count` i.i.d. CN(0, `variance`) draws.
pub fn sample_complex_gaussian(
    stream: &mut RngStream,
    count: usize,
    variance: f64,
) -> Result<Vec<C64>> {
    if !(variance >= 0.0) {
        return Err(Error::invalid("complex Gaussian variance must be >= 0"));
    }
    let mut out = alloc::vec![C64::new(0.0, 0.0); count];
    stream.fill_complex_gaussian(&mut out, variance);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_variance_gives_zeros() {
        let mut rng = RngStream::new(1, 2);
        let z = sample_complex_gaussian(&mut rng, 16, 0.0).unwrap();
        assert!(z.iter().all(|z| z.re == 0.0 && z.im == 0.0));
    }

    #[test]
    fn negative_variance_is_rejected() {
        let mut rng = RngStream::new(1, 2);
        assert!(matches!(
            sample_complex_gaussian(&mut rng, 4, -1.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn unit_variance_second_moment() {
        let mut rng = RngStream::new(7, 0);
        let z = sample_complex_gaussian(&mut rng, 1_000_000, 1.0).unwrap();
        let m2 = z.iter().map(|z| z.norm_sqr()).sum::<f64>() / z.len() as f64;
        assert!((0.995..=1.005).contains(&m2), "E|z|^2 = {m2}");
        // real and imaginary parts each carry half
        let re2 = z.iter().map(|z| z.re * z.re).sum::<f64>() / z.len() as f64;
        assert!((re2 - 0.5).abs() < 0.005, "E re^2 = {re2}");
    }

    #[test]
    fn same_stream_is_bit_identical() {
        let a = sample_complex_gaussian(&mut RngStream::new(42, 9), 64, 2.0).unwrap();
        let b = sample_complex_gaussian(&mut RngStream::new(42, 9), 64, 2.0).unwrap();
        assert!(a
            .iter()
            .zip(&b)
            .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
    }

    #[test]
    fn distinct_streams_are_uncorrelated() {
        let n = 200_000;
        let a = sample_complex_gaussian(&mut RngStream::new(3, 0), n, 1.0).unwrap();
        let b = sample_complex_gaussian(&mut RngStream::new(3, 1), n, 1.0).unwrap();
        let c: C64 = a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum::<C64>() / n as f64;
        // std error of each component is sqrt(1/(2n))
        let se = (0.5 / n as f64).sqrt();
        assert!(c.re.abs() < 4.0 * se && c.im.abs() < 4.0 * se, "{c}");
        assert_ne!(a[0], b[0]);
    }
}
