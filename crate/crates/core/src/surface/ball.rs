//! Intrinsic balls cut out of a mesh by a piecewise-linear distance field.

use serde::Serialize;

use super::graph::SteinerGraph;
use super::mesh::TriMesh;
use super::point::SurfacePoint;

/// Steiner density for ball measurements; denser than the distance default
/// because area errors are twice the relative distance error.
pub const BALL_STEINER_POINTS: usize = 7;

#[derive(Debug, Clone, Serialize)]
pub struct BallRegion {
    pub radius: f64,
    pub area: f64,
    pub boundary_length: f64,
    /// Set when every vertex lies within the radius.
    pub whole_surface: bool,
    /// Fraction of each face's area inside the ball.
    #[serde(skip)]
    pub face_fraction: Vec<f64>,
}

/// Geodesic distance from `center` to every mesh vertex.
pub fn vertex_distances(mesh: &TriMesh, graph: &SteinerGraph, center: &SurfacePoint) -> Vec<f64> {
    let labels = graph.node_distances(mesh, center);
    (0..mesh.num_vertices())
        .map(|v| graph.point_distance(mesh, &labels, center, &SurfacePoint::Vertex(v)))
        .collect()
}

/// Vertex distances from `center`, exact up to `limit` and clamped to `limit` beyond.
///
/// Graph distances of adjacent vertices differ by at most the edge length, so a
/// ball of radius `r` is reproduced exactly when `limit >= r + max_edge_length`.
pub fn bounded_vertex_distances(
    mesh: &TriMesh,
    graph: &SteinerGraph,
    center: &SurfacePoint,
    limit: f64,
) -> Vec<f64> {
    let mut labels = vec![f64::INFINITY; graph.num_nodes()];
    graph.run(&graph.source_labels(mesh, center), &mut labels, Some(limit));
    (0..mesh.num_vertices())
        .map(|v| {
            graph
                .point_distance(mesh, &labels, center, &SurfacePoint::Vertex(v))
                .min(limit)
        })
        .collect()
}

/// Sublevel set `{d <= radius}` of the linearly interpolated vertex distances.
pub fn ball_from_distances(mesh: &TriMesh, distances: &[f64], radius: f64) -> BallRegion {
    let mut area = 0.0;
    let mut boundary_length = 0.0;
    let mut face_fraction = vec![0.0; mesh.num_faces()];
    for f in 0..mesh.num_faces() {
        let p = mesh.face_points(f);
        let d = mesh.faces[f].map(|v| distances[v]);
        let inside: Vec<usize> = (0..3).filter(|&k| d[k] <= radius).collect();
        let full = mesh.face_area(f);
        let crossing = |a: usize, b: usize| {
            let t = (radius - d[a]) / (d[b] - d[a]);
            p[a] + (p[b] - p[a]) * t
        };
        let fraction = match inside.len() {
            3 => 1.0,
            0 => 0.0,
            1 => {
                let i = inside[0];
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                let tj = (radius - d[i]) / (d[j] - d[i]);
                let tk = (radius - d[i]) / (d[k] - d[i]);
                boundary_length += (crossing(i, j) - crossing(i, k)).norm();
                tj * tk
            }
            _ => {
                let k = (0..3).find(|x| !inside.contains(x)).expect("one outside");
                let (i, j) = ((k + 1) % 3, (k + 2) % 3);
                let si = (d[k] - radius) / (d[k] - d[i]);
                let sj = (d[k] - radius) / (d[k] - d[j]);
                boundary_length += (crossing(k, i) - crossing(k, j)).norm();
                1.0 - si * sj
            }
        };
        face_fraction[f] = fraction;
        area += fraction * full;
    }
    BallRegion {
        radius,
        area,
        boundary_length,
        whole_surface: distances.iter().all(|&d| d <= radius),
        face_fraction,
    }
}

/// The region `{x : d(center, x) <= r}` with clipped faces.
pub fn intrinsic_ball(
    mesh: &TriMesh,
    graph: &SteinerGraph,
    center: &SurfacePoint,
    radius: f64,
) -> BallRegion {
    ball_from_distances(mesh, &vertex_distances(mesh, graph, center), radius)
}

/// `intrinsic_ball` with a distance search pruned just beyond the radius.
pub fn local_ball(mesh: &TriMesh, graph: &SteinerGraph, center: &SurfacePoint, radius: f64) -> BallRegion {
    let limit = radius + 2.0 * mesh.max_edge_length();
    // Clamped vertices lie beyond the radius, so the whole-surface flag stays exact.
    ball_from_distances(
        mesh,
        &bounded_vertex_distances(mesh, graph, center, limit),
        radius,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::build::build_surface;
    use crate::surface::catalog::CatalogSurface;
    use crate::surface::graph::DEFAULT_STEINER_POINTS;

    #[test]
    fn ball_and_complement_partition_the_area() {
        let b = build_surface(&CatalogSurface::unit_sphere(), 8).unwrap();
        let g = SteinerGraph::new(&b.mesh, DEFAULT_STEINER_POINTS);
        let d = vertex_distances(&b.mesh, &g, &SurfacePoint::Vertex(0));
        let r = 1.1;
        let ball = ball_from_distances(&b.mesh, &d, r);
        let neg: Vec<f64> = d.iter().map(|x| -x).collect();
        let rest = ball_from_distances(&b.mesh, &neg, -r);
        assert!((ball.area + rest.area - b.mesh.surface_area()).abs() < 1e-10);
        assert!((ball.boundary_length - rest.boundary_length).abs() < 1e-10);
    }
}
