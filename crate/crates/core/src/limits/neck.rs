//! Diameter of thin annuli and the chain of bounds behind neck collapse.

use serde::Serialize;

use crate::conformal::{annulus_from_faces, AnnulusRegion, LoopSelector};
use crate::error::{Error, Result};
use crate::surface::build::BuiltMesh;
use crate::surface::{CatalogSurface, Family, SteinerGraph, SurfacePoint, DEFAULT_STEINER_POINTS};

/// Relative slack for comparisons against graph-metric distances.
pub const NECK_DISTANCE_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Serialize)]
pub struct NeckReport {
    pub eps: f64,
    pub diameter: f64,
    pub area: f64,
    pub boundary_lengths: [f64; 2],
    /// Hausdorff distance between the two boundary loops.
    pub boundary_gap: f64,
    /// Shortest path joining the loops; cutting along it leaves a disc.
    pub cut_length: f64,
    /// Boundary length of the disc left by the cut.
    pub split_boundary: f64,
    pub boundaries_within_2eps: bool,
    pub split_within_6eps: bool,
    /// The tighter `5 eps` figure also stated for the split disc.
    pub split_within_5eps: bool,
    pub area_bound: f64,
    pub area_ok: bool,
}

/// Measures `annulus` in its own intrinsic metric and checks the bounds for `eps`.
pub fn neck_diameter(annulus: &AnnulusRegion, eps: f64) -> Result<NeckReport> {
    if !(eps > 0.0) {
        return Err(Error::Config(format!("eps must be positive, got {eps}")));
    }
    let mesh = &annulus.mesh;
    let graph = SteinerGraph::new(mesh, DEFAULT_STEINER_POINTS);
    let nv = mesh.num_vertices();
    let vertex_labels = |sources: &[usize]| {
        let mut labels = vec![f64::INFINITY; graph.num_nodes()];
        let seeds: Vec<(usize, f64)> = sources.iter().map(|&s| (s, 0.0)).collect();
        graph.run(&seeds, &mut labels, None);
        labels.truncate(nv);
        labels
    };
    let from0 = vertex_labels(&annulus.boundary0);
    let from1 = vertex_labels(&annulus.boundary1);
    let gap01 = annulus.boundary1.iter().map(|&v| from0[v]).fold(0.0, f64::max);
    let gap10 = annulus.boundary0.iter().map(|&v| from1[v]).fold(0.0, f64::max);
    let cut_length = annulus
        .boundary1
        .iter()
        .map(|&v| from0[v])
        .fold(f64::INFINITY, f64::min);

    // Farthest pairs of these flat or saddle-shaped bands end on the boundary.
    let mut diameter: f64 = 0.0;
    for &s in annulus.boundary0.iter().chain(&annulus.boundary1) {
        let d = graph.node_distances(mesh, &SurfacePoint::Vertex(s));
        diameter = diameter.max(d[..nv].iter().copied().fold(0.0, f64::max));
    }

    let [l0, l1] = annulus.boundary_lengths;
    let split_boundary = l0 + l1 + 2.0 * cut_length;
    let slack = 1.0 + NECK_DISTANCE_TOLERANCE;
    let area_bound = eps * split_boundary;
    Ok(NeckReport {
        eps,
        diameter,
        area: annulus.area,
        boundary_lengths: annulus.boundary_lengths,
        boundary_gap: gap01.max(gap10),
        cut_length,
        split_boundary,
        boundaries_within_2eps: gap01.max(gap10) <= 2.0 * eps * slack,
        split_within_6eps: split_boundary <= 6.0 * eps * slack,
        split_within_5eps: split_boundary <= 5.0 * eps * slack,
        area_bound,
        area_ok: annulus.area <= area_bound,
    })
}

/// Faces of `built` whose vertices all satisfy `keep`, as an annulus.
fn band(built: &BuiltMesh, keep: impl Fn(&nalgebra::Vector3<f64>) -> bool) -> Result<AnnulusRegion> {
    let mesh = &built.mesh;
    let faces: Vec<usize> = (0..mesh.num_faces())
        .filter(|&f| mesh.faces[f].iter().all(|&v| keep(&mesh.vertices[v])))
        .collect();
    if faces.is_empty() {
        return Err(Error::Topology(
            "band contains no faces at this resolution".into(),
        ));
    }
    annulus_from_faces(mesh, &faces, LoopSelector::Index(0), LoopSelector::Index(1))
}

/// Dumbbell band between the parallels of radius `factor * neck` on the catenoid.
pub fn neck_band(surface: &CatalogSurface, built: &BuiltMesh, factor: f64) -> Result<AnnulusRegion> {
    let Family::Dumbbell { neck } = surface.family else {
        return Err(Error::Unsupported(format!("{} has no neck", surface.name())));
    };
    if !(factor > 1.0 && factor * neck <= crate::surface::dumbbell::BLEND_INNER) {
        return Err(Error::Config(format!(
            "band radius {} must lie between the waist and the end of the catenoid",
            factor * neck
        )));
    }
    let height = neck * factor.acosh();
    band(built, |p| p.z.abs() <= height)
}

/// Band between polar angles `from < to` on a round sphere.
pub fn polar_band(surface: &CatalogSurface, built: &BuiltMesh, from: f64, to: f64) -> Result<AnnulusRegion> {
    let Family::RoundSphere { radius } = surface.family else {
        return Err(Error::Unsupported(format!(
            "{} is not a round sphere",
            surface.name()
        )));
    };
    band(built, |p| {
        let angle = (p.z / radius).clamp(-1.0, 1.0).acos();
        angle >= from && angle <= to
    })
}
