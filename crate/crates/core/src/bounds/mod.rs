//! Error-probability bounds for mismatched scaled-nearest-neighbour decoding
//! of a Gaussian random code.
//!
//! Both Monte-Carlo bounds are evaluated on [`DecodingStats`], the three
//! numbers per channel sample that the bounds depend on, so a cached sample
//! set can be re-scored for many values of `s` or `M` (common random numbers).

mod decoder;
mod density;
mod estimate;
pub mod marcum;
mod rcu;
mod rcus;

pub use decoder::{true_decoder_error, true_decoder_trial, MAX_DECODER_WORK};
pub use density::{info_density, log_gaussian_denominator, AwgnSource, DecodingStats};
pub use estimate::{BoundEstimate, BoundKind, MessageCount};
pub use rcu::{pairwise_error_prob, rcu, rcu_summand};
pub use rcus::{collect_stats, minimize_over_s, noise_scale, rcus, rcus_given_s, rcus_summand, SSearch};

/// Fewest samples accepted by the sampling entry points.
pub const MIN_SAMPLES: u64 = 1_000;
