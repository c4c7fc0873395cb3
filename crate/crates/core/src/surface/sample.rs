//! Reproducible area-weighted stratified sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::catalog::CatalogSurface;
use super::mesh::TriMesh;
use super::point::{locate, SurfacePoint};

#[derive(Debug, Clone, Serialize)]
pub struct SampleSet {
    pub points: Vec<SurfacePoint>,
    pub seed: u64,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` points, one per equal-area stratum of the cumulative face area.
pub fn area_weighted_samples(mesh: &TriMesh, count: usize, seed: u64) -> SampleSet {
    let mut rng = rng(seed);
    let mut cumulative = Vec::with_capacity(mesh.num_faces());
    let mut total = 0.0;
    for f in 0..mesh.num_faces() {
        total += mesh.face_area(f);
        cumulative.push(total);
    }
    let points = (0..count)
        .map(|i| {
            let target = total * (i as f64 + rng.gen::<f64>()) / count as f64;
            let face = cumulative
                .partition_point(|&c| c < target)
                .min(mesh.num_faces() - 1);
            let (a, b): (f64, f64) = (rng.gen(), rng.gen());
            let r = a.sqrt();
            SurfacePoint::InFace {
                face,
                bary: [1.0 - r, r * (1.0 - b), r * b],
            }
        })
        .collect();
    SampleSet { points, seed }
}

/// Chart coordinates of area-weighted samples drawn on `mesh` of `surface`.
pub fn chart_samples(surface: &CatalogSurface, mesh: &TriMesh, count: usize, seed: u64) -> Vec<(f64, f64)> {
    area_weighted_samples(mesh, count, seed)
        .points
        .iter()
        .map(|p| surface.chart_of(&p.position(mesh)))
        .collect()
}

/// Places chart coordinates on a mesh of `surface`.
pub fn locate_chart_points(
    surface: &CatalogSurface,
    mesh: &TriMesh,
    chart: &[(f64, f64)],
    seed: u64,
) -> SampleSet {
    SampleSet {
        points: chart
            .iter()
            .map(|&(s, t)| locate(mesh, &surface.embed(s, t)))
            .collect(),
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::build::build_surface;

    #[test]
    fn samples_are_reproducible() {
        let m = build_surface(&CatalogSurface::unit_sphere(), 6).unwrap().mesh;
        let a = area_weighted_samples(&m, 50, 7);
        let b = area_weighted_samples(&m, 50, 7);
        assert_eq!(a.points, b.points);
        let c = area_weighted_samples(&m, 50, 8);
        assert_ne!(a.points, c.points);
    }
}
