//! Surfaces as analytic charts and as triangle meshes carrying the pullback metric.

pub mod ball;
pub mod build;
pub mod catalog;
pub mod dumbbell;
pub mod graph;
pub mod mesh;
pub mod off;
pub mod point;
pub mod sample;

pub use ball::{intrinsic_ball, local_ball, BallRegion, BALL_STEINER_POINTS};
pub use build::{build_surface, BuiltMesh};
pub use catalog::{CatalogSurface, Family};
pub use graph::{geodesic_distance, SteinerGraph, DEFAULT_STEINER_POINTS};
pub use mesh::TriMesh;
pub use point::{locate, SurfacePoint};
pub use sample::SampleSet;

/// Sum of face areas in the pullback metric.
pub fn surface_area(mesh: &TriMesh) -> f64 {
    mesh.surface_area()
}
