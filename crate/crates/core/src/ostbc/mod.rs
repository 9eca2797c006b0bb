//! Orthogonal space-time block codes and the BS-initiated downlink.

mod code;
mod link;

pub use code::{
    build_alamouti, build_rate34, build_tarokh_rate_half, code_for, hurwitz_radon_number,
    ostbc_encode, ostbc_symbol_estimates, CodeEntry, OstbcCode,
};
pub use link::{
    bsdl_sample, bsdl_sample_with_reduction, dl_pilot_estimate, dl_pilot_estimate_with_noise,
    reduce_matrix, BsDlConfig, OstbcSource, REDUCTION_STREAM,
};
