//! Explicit immersions of sphere products, their frames and second
//! fundamental forms, and sampled normal-curvature estimates.

mod basis;
mod frame;
mod map;
mod sampling;

pub use basis::{sphere_moment, QuadraticHarmonics};
pub use frame::{measured_pullback_norm2, product_geodesic, sff_at, FiniteDifference, FramePoint, SffSample};
pub use map::{build_sns1, build_sns1_optimal, build_tensor, build_veronese, ExplicitImmersion, ProductVector};
pub use sampling::{
    closed_form_sff_norm2, closed_form_sff_norm2_f64, estimate_normal_curvature, random_frame_rotation, random_point,
    random_sample, random_unit_tangent, round_norms2, sample_rng, CurvatureStats, TangentSample,
};
