//! Random streams, complex linear-algebra helpers and Monte-Carlo statistics.

mod accum;
mod linalg;
mod rng;

pub use accum::McAccumulator;
pub use linalg::{dot, dot_conj, norm, norm_sqr, CMatrix};
pub use rng::{sample_complex_gaussian, RngStream};

/// `10^(db/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * libm::log10(x)
}
