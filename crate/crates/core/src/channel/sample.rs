use alloc::vec::Vec;

use crate::numerics::RngStream;
use crate::{Result, C64};

/// One realization of `v_k = g t_k + w_k`, `k = 1..nd`, as seen by a
/// mismatched scaled-nearest-neighbour decoder that uses `g_hat`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarChannelSample {
    /// True effective gain (diagnostic only, the decoder never sees it).
    pub g: C64,
    /// Gain estimate used by the decoder.
    pub g_hat: C64,
    /// Transmitted codeword symbols.
    pub t: Vec<C64>,
    /// Received symbols.
    pub v: Vec<C64>,
    /// Codebook symbol power, `t_k ~ CN(0, rho)`.
    pub rho: f64,
}

impl ScalarChannelSample {
    /// Effective data blocklength `nd`.
    pub fn nd(&self) -> usize {
        self.t.len()
    }
}

/// Anything that produces independent channel samples from a random stream.
///
/// Implementations hold only immutable state, so one source can be shared by
/// many worker threads, each passing its own per-sample stream.
pub trait SampleSource: Sync {
    fn draw(&self, rng: &mut RngStream) -> Result<ScalarChannelSample>;

    /// Effective blocklength of every sample this source draws.
    fn blocklength(&self) -> usize;
}
