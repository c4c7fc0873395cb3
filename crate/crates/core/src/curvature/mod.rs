//! Curvature estimates, the intrinsic curvature bound and Jacobi comparison.

pub mod estimate;
pub mod jacobi;

pub use estimate::{
    conjugate_radius_bound, curvature_bound, estimate_curvatures, verify_curvature, ConjugateRadius,
    CurvatureField, CurvatureVerification,
};
pub use jacobi::{jacobi_profile, JacobiProfile};
