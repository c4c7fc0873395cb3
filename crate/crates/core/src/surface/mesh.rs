//! Oriented triangle meshes carrying the pullback metric of an ambient space.
//!
//! Edge lengths and angles are always measured face-locally: on a flat torus
//! the other two corners of a face are unwrapped to the minimal image of the
//! first, so a face never straddles a period seam.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::ambient::AmbientSpace;
use crate::error::{Error, Result};

/// Faces with area below this (relative to the squared longest edge) are degenerate.
const DEGENERATE_AREA_RATIO: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct TriMesh {
    pub vertices: Vec<Vector3<f64>>,
    pub faces: Vec<[usize; 3]>,
    pub ambient: AmbientSpace,
    pub with_boundary: bool,
    edges: Vec<[usize; 2]>,
    edge_lookup: HashMap<(usize, usize), usize>,
    edge_faces: Vec<Vec<usize>>,
    vertex_faces: Vec<Vec<usize>>,
    vertex_neighbors: Vec<Vec<usize>>,
    boundary_loops: Vec<Vec<usize>>,
    on_boundary: Vec<bool>,
}

impl TriMesh {
    /// Builds and validates a mesh. A closed mesh must have no boundary edges.
    pub fn new(
        vertices: Vec<Vector3<f64>>,
        faces: Vec<[usize; 3]>,
        ambient: AmbientSpace,
        with_boundary: bool,
    ) -> Result<Self> {
        if vertices.is_empty() || faces.is_empty() {
            return Err(Error::Mesh("mesh has no vertices or no faces".into()));
        }
        let nv = vertices.len();
        let mut used = vec![false; nv];
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            if f.iter().any(|&i| i >= nv) {
                return Err(Error::Mesh(format!("face {fi} references a missing vertex")));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::Mesh(format!("face {fi} repeats a vertex")));
            }
            for k in 0..3 {
                used[f[k]] = true;
                let key = (f[k], f[(k + 1) % 3]);
                if let Some(other) = directed.insert(key, fi) {
                    return Err(Error::Mesh(format!(
                        "directed edge {key:?} shared by faces {other} and {fi}: \
                         inconsistent orientation or non-manifold edge"
                    )));
                }
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::Mesh(format!("vertex {v} is not used by any face")));
        }

        let mut edges = Vec::new();
        let mut edge_lookup = HashMap::new();
        let mut edge_faces: Vec<Vec<usize>> = Vec::new();
        let mut vertex_faces = vec![Vec::new(); nv];
        let mut vertex_neighbors = vec![Vec::new(); nv];
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                vertex_faces[f[k]].push(fi);
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let id = *edge_lookup.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edge_faces.push(Vec::new());
                    vertex_neighbors[key.0].push(key.1);
                    vertex_neighbors[key.1].push(key.0);
                    edges.len() - 1
                });
                edge_faces[id].push(fi);
            }
        }

        // Boundary half-edges a -> b are those whose twin b -> a is absent.
        let mut next: HashMap<usize, usize> = HashMap::new();
        for &(a, b) in directed.keys() {
            if !directed.contains_key(&(b, a)) && next.insert(a, b).is_some() {
                return Err(Error::Mesh(format!(
                    "vertex {a} is a non-manifold boundary vertex"
                )));
            }
        }
        if !with_boundary && !next.is_empty() {
            return Err(Error::Mesh(format!(
                "closed mesh has {} boundary edges",
                next.len()
            )));
        }
        let mut on_boundary = vec![false; nv];
        let mut boundary_loops = Vec::new();
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        for start in starts {
            if on_boundary[start] {
                continue;
            }
            let mut lp = vec![start];
            on_boundary[start] = true;
            let mut cur = next[&start];
            while cur != start {
                if on_boundary[cur] {
                    return Err(Error::Mesh("boundary loops are not simple".into()));
                }
                on_boundary[cur] = true;
                lp.push(cur);
                cur = *next
                    .get(&cur)
                    .ok_or_else(|| Error::Mesh("open boundary chain".into()))?;
            }
            boundary_loops.push(lp);
        }

        let mesh = Self {
            vertices,
            faces,
            ambient,
            with_boundary,
            edges,
            edge_lookup,
            edge_faces,
            vertex_faces,
            vertex_neighbors,
            boundary_loops,
            on_boundary,
        };
        for fi in 0..mesh.faces.len() {
            let l = mesh.face_edge_lengths(fi);
            let longest = l.iter().cloned().fold(0.0, f64::max);
            if !(mesh.face_area(fi) > DEGENERATE_AREA_RATIO * longest * longest) {
                return Err(Error::Mesh(format!("face {fi} is degenerate")));
            }
        }
        if !mesh.with_boundary && (2 - mesh.euler_characteristic()) % 2 != 0 {
            return Err(Error::Topology(format!(
                "closed mesh has odd Euler characteristic {}",
                mesh.euler_characteristic()
            )));
        }
        Ok(mesh)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn edge_faces(&self, e: usize) -> &[usize] {
        &self.edge_faces[e]
    }

    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.vertex_neighbors[v]
    }

    pub fn boundary_loops(&self) -> &[Vec<usize>] {
        &self.boundary_loops
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.on_boundary[v]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_faces[e].len() == 1
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Genus from `chi = 2 - 2g - b`.
    pub fn genus(&self) -> i64 {
        (2 - self.euler_characteristic() - self.boundary_loops.len() as i64) / 2
    }

    /// Corner positions of a face, unwrapped around the first corner.
    pub fn face_points(&self, f: usize) -> [Vector3<f64>; 3] {
        let [a, b, c] = self.faces[f];
        let p = self.vertices[a];
        [
            p,
            p + self.ambient.displacement(&p, &self.vertices[b]),
            p + self.ambient.displacement(&p, &self.vertices[c]),
        ]
    }

    /// Lengths of the edges opposite each corner.
    pub fn face_edge_lengths(&self, f: usize) -> [f64; 3] {
        let [p0, p1, p2] = self.face_points(f);
        [(p2 - p1).norm(), (p0 - p2).norm(), (p1 - p0).norm()]
    }

    pub fn face_normal(&self, f: usize) -> Vector3<f64> {
        let [p0, p1, p2] = self.face_points(f);
        (p1 - p0).cross(&(p2 - p0))
    }

    pub fn face_area(&self, f: usize) -> f64 {
        0.5 * self.face_normal(f).norm()
    }

    /// Interior angle at each corner.
    pub fn face_angles(&self, f: usize) -> [f64; 3] {
        let p = self.face_points(f);
        let mut out = [0.0; 3];
        for k in 0..3 {
            let u = p[(k + 1) % 3] - p[k];
            let w = p[(k + 2) % 3] - p[k];
            out[k] = u.cross(&w).norm().atan2(u.dot(&w));
        }
        out
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e];
        self.ambient.distance(&self.vertices[a], &self.vertices[b])
    }

    pub fn max_edge_length(&self) -> f64 {
        (0..self.edges.len())
            .map(|e| self.edge_length(e))
            .fold(0.0, f64::max)
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    /// `2 pi - angle sum` at interior vertices, `pi - angle sum` on the boundary.
    pub fn angle_defects(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.vertices.len()];
        for (fi, f) in self.faces.iter().enumerate() {
            let ang = self.face_angles(fi);
            for k in 0..3 {
                sums[f[k]] += ang[k];
            }
        }
        sums.iter()
            .enumerate()
            .map(|(v, s)| if self.on_boundary[v] { PI - s } else { 2.0 * PI - s })
            .collect()
    }

    /// Mixed Voronoi area of each vertex; the per-face shares sum to the face area.
    pub fn mixed_voronoi_areas(&self) -> Vec<f64> {
        let mut areas = vec![0.0; self.vertices.len()];
        for (fi, f) in self.faces.iter().enumerate() {
            let share = self.mixed_area_shares(fi);
            for k in 0..3 {
                areas[f[k]] += share[k];
            }
        }
        areas
    }

    fn mixed_area_shares(&self, f: usize) -> [f64; 3] {
        let ang = self.face_angles(f);
        let area = self.face_area(f);
        if let Some(obtuse) = (0..3).find(|&k| ang[k] > PI / 2.0) {
            let mut s = [area / 4.0; 3];
            s[obtuse] = area / 2.0;
            return s;
        }
        let l = self.face_edge_lengths(f);
        let cot = ang.map(|a| 1.0 / a.tan());
        let mut s = [0.0; 3];
        for k in 0..3 {
            // Edges meeting at corner k are opposite corners k+1 and k+2.
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            s[k] = (l[i] * l[i] * cot[i] + l[j] * l[j] * cot[j]) / 8.0;
        }
        s
    }

    /// Sub-mesh on the given faces, with vertices renumbered in first-use order.
    /// Returns the mesh and the map from new vertex index to old.
    pub fn submesh(&self, faces: &[usize]) -> Result<(TriMesh, Vec<usize>)> {
        let mut remap = HashMap::new();
        let mut old_of_new = Vec::new();
        let mut new_faces = Vec::with_capacity(faces.len());
        for &fi in faces {
            let f = self.faces[fi];
            let mut nf = [0; 3];
            for k in 0..3 {
                nf[k] = *remap.entry(f[k]).or_insert_with(|| {
                    old_of_new.push(f[k]);
                    old_of_new.len() - 1
                });
            }
            new_faces.push(nf);
        }
        let verts = old_of_new.iter().map(|&v| self.vertices[v]).collect();
        let sub = TriMesh::new(verts, new_faces, self.ambient.clone(), true)?;
        Ok((sub, old_of_new))
    }

    /// Copy of the mesh with all coordinates multiplied by `t` (euclidean ambients).
    pub fn scaled(&self, t: f64) -> Result<TriMesh> {
        TriMesh::new(
            self.vertices.iter().map(|v| v * t).collect(),
            self.faces.clone(),
            self.ambient.clone(),
            self.with_boundary,
        )
    }

    /// Sizes of the connected components of the vertex graph.
    pub fn components(&self) -> usize {
        let mut seen = vec![false; self.vertices.len()];
        let mut count = 0;
        for s in 0..self.vertices.len() {
            if seen[s] {
                continue;
            }
            count += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(v) = stack.pop() {
                for &w in &self.vertex_neighbors[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetra() -> TriMesh {
        let v = vec![
            Vector3::new(1.0, 1.0, 1.0),
            Vector3::new(1.0, -1.0, -1.0),
            Vector3::new(-1.0, 1.0, -1.0),
            Vector3::new(-1.0, -1.0, 1.0),
        ];
        let f = vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
        TriMesh::new(v, f, AmbientSpace::euclidean(3).unwrap(), false).unwrap()
    }

    #[test]
    fn tetrahedron_topology() {
        let m = tetra();
        assert_eq!(m.euler_characteristic(), 2);
        assert_eq!(m.genus(), 0);
        let total: f64 = m.angle_defects().iter().sum();
        assert!((total - 4.0 * PI).abs() < 1e-12);
        let vor: f64 = m.mixed_voronoi_areas().iter().sum();
        assert!((vor - m.surface_area()).abs() < 1e-12);
    }

    #[test]
    fn rejects_inconsistent_orientation() {
        let v = vec![
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(1.0, 1.0, 0.0),
        ];
        let f = vec![[0, 1, 2], [1, 2, 3]];
        let r = TriMesh::new(v, f, AmbientSpace::euclidean(3).unwrap(), true);
        assert!(r.is_err());
    }

    #[test]
    fn open_mesh_requires_flag() {
        let v = vec![
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
        ];
        let e = AmbientSpace::euclidean(3).unwrap();
        assert!(TriMesh::new(v.clone(), vec![[0, 1, 2]], e.clone(), false).is_err());
        let m = TriMesh::new(v, vec![[0, 1, 2]], e, true).unwrap();
        assert_eq!(m.boundary_loops().len(), 1);
        assert_eq!(m.boundary_loops()[0].len(), 3);
    }

    #[test]
    fn degenerate_face_rejected() {
        let v = vec![
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(2.0, 0.0, 0.0),
        ];
        let r = TriMesh::new(v, vec![[0, 1, 2]], AmbientSpace::euclidean(3).unwrap(), true);
        assert!(matches!(r, Err(Error::Mesh(_))));
    }
}
