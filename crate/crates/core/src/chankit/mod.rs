//! Kraus channels: the exact single-copy conversion channel, twirling, covariance defects
//! and the grid estimator used by the estimate-then-convert pipeline.

mod build;
mod channel;
mod estimate;
mod twirl;

pub use build::{build_conversion_channel, c_matrix, ChannelBuildArtifacts};
pub use channel::{apply_channel, apply_channel_power, conversion_infidelity, KrausChannel};
pub use estimate::{
    estimate_and_convert, estimate_group_element, estimation_grid, EstimateConvertReport, EstimateOptions,
};
pub use twirl::{covariance_defect, random_points, twirl, TwirlSampling, Twirled};
pub(crate) use twirl::{cyclic_grid, twirl_kraus};
