//! Locations on a mesh and nearest-point queries.

use nalgebra::Vector3;
use serde::Serialize;

use super::mesh::TriMesh;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SurfacePoint {
    Vertex(usize),
    InFace { face: usize, bary: [f64; 3] },
}

impl SurfacePoint {
    /// Ambient position (wrapped into the fundamental domain on a torus).
    pub fn position(&self, mesh: &TriMesh) -> Vector3<f64> {
        match *self {
            SurfacePoint::Vertex(v) => mesh.vertices[v],
            SurfacePoint::InFace { face, bary } => {
                let p = mesh.face_points(face);
                mesh.ambient
                    .wrap(p[0] * bary[0] + p[1] * bary[1] + p[2] * bary[2])
            }
        }
    }

    /// A face containing the point together with its barycentric coordinates there.
    pub fn face_and_bary(&self, mesh: &TriMesh) -> (usize, [f64; 3]) {
        match *self {
            SurfacePoint::InFace { face, bary } => (face, bary),
            SurfacePoint::Vertex(v) => {
                let f = mesh.vertex_faces(v)[0];
                let k = mesh.faces[f].iter().position(|&x| x == v).expect("incident");
                let mut bary = [0.0; 3];
                bary[k] = 1.0;
                (f, bary)
            }
        }
    }
}

/// Closest point of triangle `abc` to `p`, as barycentric coordinates.
pub fn closest_on_triangle(
    p: &Vector3<f64>,
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    c: &Vector3<f64>,
) -> [f64; 3] {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return [1.0, 0.0, 0.0];
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return [0.0, 1.0, 0.0];
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return [1.0 - v, v, 0.0];
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return [0.0, 0.0, 1.0];
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return [1.0 - w, 0.0, w];
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return [0.0, 1.0 - w, w];
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    [1.0 - v - w, v, w]
}

/// Nearest vertex by brute force, then the closest point over faces in its 2-ring.
pub fn locate(mesh: &TriMesh, p: &Vector3<f64>) -> SurfacePoint {
    let nearest = (0..mesh.num_vertices())
        .min_by(|&a, &b| {
            mesh.ambient
                .distance(p, &mesh.vertices[a])
                .total_cmp(&mesh.ambient.distance(p, &mesh.vertices[b]))
        })
        .expect("nonempty mesh");
    let mut faces: Vec<usize> = mesh.vertex_faces(nearest).to_vec();
    for &n in mesh.neighbors(nearest) {
        faces.extend_from_slice(mesh.vertex_faces(n));
    }
    faces.sort_unstable();
    faces.dedup();
    let mut best = (f64::INFINITY, SurfacePoint::Vertex(nearest));
    for f in faces {
        let q = mesh.face_points(f);
        // Express the query in the face's unwrapped frame.
        let pl = q[0] + mesh.ambient.displacement(&q[0], p);
        let bary = closest_on_triangle(&pl, &q[0], &q[1], &q[2]);
        let x = q[0] * bary[0] + q[1] * bary[1] + q[2] * bary[2];
        let d = (x - pl).norm();
        if d < best.0 {
            best = (d, SurfacePoint::InFace { face: f, bary });
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closest_point_regions() {
        let a = Vector3::new(0.0, 0.0, 0.0);
        let b = Vector3::new(1.0, 0.0, 0.0);
        let c = Vector3::new(0.0, 1.0, 0.0);
        let inside = closest_on_triangle(&Vector3::new(0.2, 0.3, 5.0), &a, &b, &c);
        assert!((inside[1] - 0.2).abs() < 1e-12 && (inside[2] - 0.3).abs() < 1e-12);
        assert_eq!(
            closest_on_triangle(&Vector3::new(-1.0, -1.0, 0.0), &a, &b, &c),
            [1.0, 0.0, 0.0]
        );
        let edge = closest_on_triangle(&Vector3::new(1.0, 1.0, 0.0), &a, &b, &c);
        assert!((edge[1] - 0.5).abs() < 1e-12 && (edge[2] - 0.5).abs() < 1e-12);
    }
}
