//! Isoperimetric constants, ball-area monotonicity, greedy nets with their
//! cardinality brackets, and curvature integrals over shrinking balls.

pub mod gauss_bonnet;
pub mod isoperimetric;
pub mod monotonicity;
pub mod net;

pub use gauss_bonnet::{gauss_bonnet_ball_scan, GaussBonnetScan, ScanOutcome};
pub use isoperimetric::{isoperimetric_check, v0, IsoperimetricBranch, IsoperimetricRecord, RegionMeasure};
pub use monotonicity::{
    monotonicity_check, monotonicity_constants, MonotonicityConstants, MonotonicityResult, DEFAULT_BETA,
};
pub use net::{greedy_net, net_cardinality_bounds, packing_bracket, CardinalityBounds, Net};
