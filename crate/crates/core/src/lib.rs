//! Finite-blocklength achievability bounds for short-packet massive MIMO links.
//!
//! Every link studied here is reduced to the scalar form `v_k = g t_k + w_k`
//! (a [`channel::ScalarChannelSample`]) that a mismatched scaled-nearest-neighbour
//! decoder sees, and the packet error probability of a Gaussian random code is
//! then bounded by Monte-Carlo evaluation of the RCUS or RCU bound:
//!
//! - [`numerics`]: counter-based random streams, small dense complex matrices and
//!   mergeable Monte-Carlo accumulators.
//! - [`channel`]: UE-initiated uplink (MMSE estimation + maximum-ratio combining)
//!   and downlink (maximum-ratio precoding, hardening-based gain estimate).
//! - [`ostbc`]: orthogonal space-time block codes for the BS-initiated downlink
//!   with downlink pilots and a dimension-reducing antenna map.
//! - [`bounds`]: generalized information density, RCUS and RCU bounds, and a
//!   direct simulation of the decoder.
//! - [`search`]: minimum-SNR bisection and error-budget splitting.
//!
//! The crate is `no_std` and only needs `alloc`; parallel execution, file
//! formats and the command-line front end live in the `fblmimo` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod channel;
mod error;
pub mod numerics;
pub mod ostbc;
pub mod search;

pub use error::Error;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

pub type Result<T, E = Error> = core::result::Result<T, E>;
