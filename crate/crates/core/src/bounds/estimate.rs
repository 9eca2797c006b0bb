use num_traits::Float;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Rcus,
    Rcu,
    TrueDecoder,
}

/// Monte-Carlo estimate of an error probability (or of a bound on it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundEstimate {
    pub epsilon: f64,
    pub std_error: f64,
    pub n_samples: u64,
    /// Chernoff parameter at which the estimate was taken; 1 when unused.
    pub s_star: f64,
    pub kind: BoundKind,
}

impl BoundEstimate {
    pub fn ci95(&self) -> f64 {
        1.96 * self.std_error
    }
}

/// Number of messages `M`, kept as `ln(M - 1)` so that payloads beyond 64
/// bits are representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MessageCount {
    ln_m_minus_1: f64,
    exact: Option<u64>,
}

impl MessageCount {
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("M must be >= 1"));
        }
        Ok(Self {
            ln_m_minus_1: Float::ln((m - 1) as f64),
            exact: Some(m),
        })
    }

    /// `M = 2^bits`.
    pub fn from_bits(bits: u32) -> Self {
        let ln_m_minus_1 = if bits == 0 {
            f64::NEG_INFINITY
        } else {
            bits as f64 * core::f64::consts::LN_2 + Float::ln_1p(-Float::powi(2.0, -(bits as i32)))
        };
        Self {
            ln_m_minus_1,
            exact: 1u64.checked_shl(bits),
        }
    }

    pub fn ln_m_minus_1(&self) -> f64 {
        self.ln_m_minus_1
    }

    /// `M` itself when it fits in 64 bits.
    pub fn count(&self) -> Option<u64> {
        self.exact
    }

    pub fn is_single(&self) -> bool {
        self.ln_m_minus_1 == f64::NEG_INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn message_counts() {
        let m = MessageCount::from_bits(30);
        assert_eq!(m.count(), Some(1 << 30));
        let direct = ((1u64 << 30) - 1) as f64;
        assert!((m.ln_m_minus_1() - direct.ln()).abs() < 1e-14);
        assert!(MessageCount::from_bits(0).is_single());
        assert!(MessageCount::new(1).unwrap().is_single());
        assert_eq!(MessageCount::new(2).unwrap().ln_m_minus_1(), 0.0);
        assert!(MessageCount::new(0).is_err());
        let big = MessageCount::from_bits(100);
        assert_eq!(big.count(), None);
        assert!((big.ln_m_minus_1() - 100.0 * core::f64::consts::LN_2).abs() < 1e-12);
    }
}
