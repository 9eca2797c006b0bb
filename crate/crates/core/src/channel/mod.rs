//! Massive-MIMO channel model for the UE-initiated link.
//!
//! Fading, MMSE estimation from uplink pilots, maximum-ratio combining and
//! precoding, and the reduction of one user's link to a
//! [`ScalarChannelSample`].

mod config;
mod estimation;
mod sample;
mod ue;

pub use config::{Fading, Scenario, SystemConfig};
pub use estimation::{mmse_estimate, mmse_estimate_with_noise, sample_fading, FadingBlock};
pub use sample::{SampleSource, ScalarChannelSample};
pub use ue::{
    dl_gain_estimate, dl_gain_estimate_mc, dl_sample, mrc_combiner, mrt_precoder, ul_sample,
    DownlinkSource, UplinkSource,
};
