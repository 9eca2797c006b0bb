//! Sweeps, configuration files, CSV output and the `fblmimo` command line,
//! on top of the `no_std` core crate.
//!
//! Monte-Carlo work is spread over a rayon pool in fixed-size chunks, so every
//! number written to disk is independent of the thread count.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod mc;
pub mod output;
pub mod validate;
