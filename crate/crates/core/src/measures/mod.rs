//! Test functions, covering sums, box counting and pushforward measures.

mod cloud;
mod cover;
mod pushforward;
mod test_function;
mod zero_fractal;

pub use cloud::{manifest_path, PointCloud};
pub use cover::{box_count, box_dimension, covering_sum, log_spaced_scales, BoxDimension};
pub use pushforward::{
    pushforward_mass, scale_covariance_check, Classification, MassInterval, PushforwardMeasure,
    Query, RatioCheck,
};
pub use test_function::TestFunction;
pub use zero_fractal::{zero_fractal_cloud, zero_fractal_probe, ProbeRow, ProbeTable};
