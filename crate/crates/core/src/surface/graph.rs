//! Geodesic distances by shortest paths on a Steiner-refined edge graph.
//!
//! Node `v < nv` is mesh vertex `v`; node `nv + e * k + i` is the `i`-th of the
//! `k` evenly spaced Steiner points on edge `e`, counted from the lower vertex
//! id. Inside each face every pair of boundary nodes lying on different edges
//! is joined by a straight segment; consecutive nodes along an edge are
//! joined once. The graph metric is an upper bound on the polyhedral metric
//! and decreases as `k` grows through nested node sets.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::Vector3;

use super::mesh::TriMesh;
use super::point::SurfacePoint;
use crate::error::{Error, Result};

pub const DEFAULT_STEINER_POINTS: usize = 3;

#[derive(Debug, Clone)]
pub struct SteinerGraph {
    pub steiner_points: usize,
    num_vertices: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    node: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl SteinerGraph {
    pub fn new(mesh: &TriMesh, steiner_points: usize) -> Self {
        let k = steiner_points;
        let nv = mesh.num_vertices();
        let num_nodes = nv + mesh.edges().len() * k;
        let mut arcs: Vec<(u32, u32, f64)> = Vec::new();
        // Along-edge chains.
        for e in 0..mesh.edges().len() {
            let [a, b] = mesh.edges()[e];
            let step = mesh.edge_length(e) / (k + 1) as f64;
            let mut prev = a;
            for i in 0..k {
                let node = nv + e * k + i;
                arcs.push((prev as u32, node as u32, step));
                prev = node;
            }
            arcs.push((prev as u32, b as u32, step));
        }
        // Cross-face segments.
        let graph = Self {
            steiner_points: k,
            num_vertices: nv,
            offsets: Vec::new(),
            targets: Vec::new(),
            weights: Vec::new(),
        };
        for f in 0..mesh.num_faces() {
            let nodes = graph.face_nodes(mesh, f);
            for i in 0..nodes.len() {
                for j in i + 1..nodes.len() {
                    let (ni, pi, ei) = nodes[i];
                    let (nj, pj, ej) = nodes[j];
                    if ei & ej == 0 {
                        arcs.push((ni as u32, nj as u32, (pi - pj).norm()));
                    }
                }
            }
        }
        let mut degree = vec![0usize; num_nodes + 1];
        for &(a, b, _) in &arcs {
            degree[a as usize + 1] += 1;
            degree[b as usize + 1] += 1;
        }
        for i in 0..num_nodes {
            degree[i + 1] += degree[i];
        }
        let offsets = degree;
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; 2 * arcs.len()];
        let mut weights = vec![0.0; 2 * arcs.len()];
        for &(a, b, w) in &arcs {
            let (a, b) = (a as usize, b as usize);
            targets[fill[a]] = b as u32;
            weights[fill[a]] = w;
            fill[a] += 1;
            targets[fill[b]] = a as u32;
            weights[fill[b]] = w;
            fill[b] += 1;
        }
        Self {
            offsets,
            targets,
            weights,
            ..graph
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_arcs(&self) -> usize {
        self.targets.len()
    }

    /// Nodes on the boundary of face `f` with their face-local positions and a
    /// bitmask of the face edges they lie on (corners lie on two).
    pub fn face_nodes(&self, mesh: &TriMesh, f: usize) -> Vec<(usize, Vector3<f64>, u8)> {
        let k = self.steiner_points;
        let p = mesh.face_points(f);
        let face = mesh.faces[f];
        let mut out = Vec::with_capacity(3 + 3 * k);
        for c in 0..3 {
            // Corner c lies on local edges c (c -> c+1) and c+2 (c+2 -> c).
            out.push((face[c], p[c], (1u8 << c) | (1u8 << ((c + 2) % 3))));
        }
        for c in 0..3 {
            let (a, b) = (face[c], face[(c + 1) % 3]);
            let e = mesh.edge_id(a, b).expect("face edge");
            let (from, to) = if a < b {
                (p[c], p[(c + 1) % 3])
            } else {
                (p[(c + 1) % 3], p[c])
            };
            for i in 0..k {
                let t = (i + 1) as f64 / (k + 1) as f64;
                out.push((self.num_vertices + e * k + i, from + (to - from) * t, 1u8 << c));
            }
        }
        out
    }

    /// Initial labels for a source point: itself if a vertex, otherwise the
    /// straight-line distances to the boundary nodes of its face.
    pub fn source_labels(&self, mesh: &TriMesh, source: &SurfacePoint) -> Vec<(usize, f64)> {
        match *source {
            SurfacePoint::Vertex(v) => vec![(v, 0.0)],
            SurfacePoint::InFace { face, bary } => {
                let p = mesh.face_points(face);
                let x = p[0] * bary[0] + p[1] * bary[1] + p[2] * bary[2];
                self.face_nodes(mesh, face)
                    .into_iter()
                    .map(|(n, q, _)| (n, (q - x).norm()))
                    .collect()
            }
        }
    }

    /// Full single-source shortest paths over all nodes.
    pub fn node_distances(&self, mesh: &TriMesh, source: &SurfacePoint) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.num_nodes()];
        self.run(&self.source_labels(mesh, source), &mut dist, None);
        dist
    }

    /// Lowers `field` to `min(field, d(source, .))`, exploring only nodes it improves.
    /// Exact because a field of graph distances is 1-Lipschitz along arcs.
    pub fn lower_field(&self, mesh: &TriMesh, source: &SurfacePoint, field: &mut [f64]) {
        self.run(&self.source_labels(mesh, source), field, None);
    }

    /// Dijkstra that only settles labels below the current value in `dist` and
    /// below `limit` when given. Returns the settled nodes in order.
    pub fn run(&self, sources: &[(usize, f64)], dist: &mut [f64], limit: Option<f64>) -> Vec<usize> {
        let cap = limit.unwrap_or(f64::INFINITY);
        let mut heap = BinaryHeap::new();
        for &(n, d) in sources {
            if d < dist[n] && d <= cap {
                dist[n] = d;
                heap.push(Entry {
                    dist: d,
                    node: n as u32,
                });
            }
        }
        let mut settled = Vec::new();
        while let Some(Entry { dist: d, node }) = heap.pop() {
            let u = node as usize;
            if d > dist[u] {
                continue;
            }
            settled.push(u);
            for a in self.offsets[u]..self.offsets[u + 1] {
                let v = self.targets[a] as usize;
                let nd = d + self.weights[a];
                if nd < dist[v] && nd <= cap {
                    dist[v] = nd;
                    heap.push(Entry {
                        dist: nd,
                        node: v as u32,
                    });
                }
            }
        }
        settled
    }

    /// Distance to `target` given node labels from `source`.
    pub fn point_distance(
        &self,
        mesh: &TriMesh,
        labels: &[f64],
        source: &SurfacePoint,
        target: &SurfacePoint,
    ) -> f64 {
        match *target {
            SurfacePoint::Vertex(v) => {
                let mut d = labels[v];
                if let SurfacePoint::InFace { face, bary } = *source {
                    if mesh.faces[face].contains(&v) {
                        let p = mesh.face_points(face);
                        let x = p[0] * bary[0] + p[1] * bary[1] + p[2] * bary[2];
                        let k = mesh.faces[face].iter().position(|&c| c == v).expect("corner");
                        d = d.min((p[k] - x).norm());
                    }
                }
                d
            }
            SurfacePoint::InFace { face, bary } => {
                let p = mesh.face_points(face);
                let y = p[0] * bary[0] + p[1] * bary[1] + p[2] * bary[2];
                let mut d = self
                    .face_nodes(mesh, face)
                    .into_iter()
                    .map(|(n, q, _)| labels[n] + (q - y).norm())
                    .fold(f64::INFINITY, f64::min);
                let (sf, sb) = source.face_and_bary(mesh);
                if sf == face {
                    let x = p[0] * sb[0] + p[1] * sb[1] + p[2] * sb[2];
                    d = d.min((x - y).norm());
                }
                d
            }
        }
    }

    /// Distances from `source` to each target; unreachable targets are an error.
    pub fn distances(
        &self,
        mesh: &TriMesh,
        source: &SurfacePoint,
        targets: &[SurfacePoint],
    ) -> Result<Vec<f64>> {
        let labels = self.node_distances(mesh, source);
        targets
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let d = self.point_distance(mesh, &labels, source, t);
                if d.is_finite() {
                    Ok(d)
                } else {
                    Err(Error::Unreachable { target: i })
                }
            })
            .collect()
    }
}

/// Geodesic distances from `source` to `targets` with the default Steiner density.
pub fn geodesic_distance(
    mesh: &TriMesh,
    source: &SurfacePoint,
    targets: &[SurfacePoint],
) -> Result<Vec<f64>> {
    SteinerGraph::new(mesh, DEFAULT_STEINER_POINTS).distances(mesh, source, targets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::AmbientSpace;
    use crate::surface::build::open_grid;

    fn unit_square(n: usize) -> TriMesh {
        let (v, f) = open_grid(n, n, |s, t| Vector3::new(s, t, 0.0));
        TriMesh::new(v, f, AmbientSpace::euclidean(3).unwrap(), true).unwrap()
    }

    #[test]
    fn straight_segments_are_exact_along_grid_lines() {
        let m = unit_square(4);
        let d = geodesic_distance(&m, &SurfacePoint::Vertex(0), &[SurfacePoint::Vertex(4)]).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_within_face_is_exact() {
        let m = unit_square(1);
        let far = m
            .vertices
            .iter()
            .position(|p| (p - Vector3::new(1.0, 1.0, 0.0)).norm() < 1e-12)
            .unwrap();
        let d = geodesic_distance(&m, &SurfacePoint::Vertex(0), &[SurfacePoint::Vertex(far)]).unwrap();
        assert!((d[0] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn disconnected_target_is_unreachable() {
        let e = AmbientSpace::euclidean(3).unwrap();
        let v = vec![
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(5.0, 0.0, 0.0),
            Vector3::new(6.0, 0.0, 0.0),
            Vector3::new(5.0, 1.0, 0.0),
        ];
        let m = TriMesh::new(v, vec![[0, 1, 2], [3, 4, 5]], e, true).unwrap();
        let r = geodesic_distance(&m, &SurfacePoint::Vertex(0), &[SurfacePoint::Vertex(4)]);
        assert!(matches!(r, Err(Error::Unreachable { target: 0 })));
    }
}
