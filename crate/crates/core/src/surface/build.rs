//! Mesh builders for catalog surfaces and planar test domains.
//!
//! All vertices are placed exactly on the analytic surface. Builders report
//! `edge_constant = max_edge_length * resolution`.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::Vector3;

use super::catalog::{CatalogSurface, Family};
use super::mesh::TriMesh;
use crate::ambient::AmbientSpace;
use crate::error::{Error, Result};

/// A mesh with the chart coordinates `(s, t)` of each vertex.
#[derive(Debug, Clone)]
pub struct BuiltMesh {
    pub mesh: TriMesh,
    pub chart: Vec<(f64, f64)>,
    pub resolution: usize,
    pub edge_constant: f64,
}

pub fn build_surface(surface: &CatalogSurface, resolution: usize) -> Result<BuiltMesh> {
    if resolution < 3 {
        return Err(Error::Config(format!(
            "resolution must be at least 3, got {resolution}"
        )));
    }
    let (vertices, faces) = match &surface.family {
        Family::RoundSphere { radius } => {
            let (v, f) = icosphere(resolution);
            (v.into_iter().map(|p| p * *radius).collect(), f)
        }
        Family::Ellipsoid { a, b, c } => {
            let (v, f) = icosphere(resolution);
            let scale = Vector3::new(*a, *b, *c);
            (v.into_iter().map(|p| p.component_mul(&scale)).collect(), f)
        }
        Family::FlatTorus2 => {
            let (p0, p1) = surface.flat_periods();
            let longest = p0.max(p1);
            let nx = ((resolution as f64 * p0 / longest).round() as usize).max(3);
            let ny = ((resolution as f64 * p1 / longest).round() as usize).max(3);
            periodic_grid(nx, ny, |s, t| surface.embed(s, t))
        }
        Family::TorusOfRevolution { major, minor } => {
            let h = 2.0 * PI * (major + minor) / resolution as f64;
            let ns = ((2.0 * PI * minor / h).ceil() as usize).max(6);
            periodic_grid(ns, resolution, |s, t| surface.embed(s, t))
        }
        Family::Dumbbell { .. } => dumbbell_rings(surface, resolution),
    };
    let chart = vertices.iter().map(|p| surface.chart_of(p)).collect();
    let mesh = TriMesh::new(vertices, faces, surface.ambient.clone(), false)?;
    let expected = 2 - 2 * surface.genus();
    if mesh.euler_characteristic() != expected {
        return Err(Error::Topology(format!(
            "{} mesh has Euler characteristic {}, expected {expected}",
            surface.name(),
            mesh.euler_characteristic()
        )));
    }
    let edge_constant = mesh.max_edge_length() * resolution as f64;
    Ok(BuiltMesh {
        mesh,
        chart,
        resolution,
        edge_constant,
    })
}

/// Unit icosphere with `freq^2` triangles per icosahedron face.
pub fn icosphere(freq: usize) -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut corners = Vec::new();
    for a in [-1.0, 1.0] {
        for b in [-phi, phi] {
            corners.push(Vector3::new(0.0, a, b));
            corners.push(Vector3::new(a, b, 0.0));
            corners.push(Vector3::new(b, 0.0, a));
        }
    }
    // Icosahedron edges have length 2 in these coordinates.
    let mut ico_faces = Vec::new();
    for i in 0..12 {
        for j in i + 1..12 {
            for k in j + 1..12 {
                let adjacent = |x: usize, y: usize| ((corners[x] - corners[y]).norm() - 2.0).abs() < 1e-9;
                if adjacent(i, j) && adjacent(j, k) && adjacent(i, k) {
                    let n = (corners[j] - corners[i]).cross(&(corners[k] - corners[i]));
                    if n.dot(&(corners[i] + corners[j] + corners[k])) > 0.0 {
                        ico_faces.push([i, j, k]);
                    } else {
                        ico_faces.push([i, k, j]);
                    }
                }
            }
        }
    }

    let n = freq;
    let mut index: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for f in &ico_faces {
        let mut local = HashMap::new();
        for i in 0..=n {
            for j in 0..=n - i {
                let weights = [(f[0], n - i - j), (f[1], i), (f[2], j)];
                let mut key: Vec<(usize, usize)> = weights.iter().copied().filter(|w| w.1 > 0).collect();
                key.sort_unstable();
                let id = *index.entry(key).or_insert_with(|| {
                    let p = weights
                        .iter()
                        .fold(Vector3::zeros(), |acc, &(c, w)| acc + corners[c] * w as f64);
                    vertices.push(p.normalize());
                    vertices.len() - 1
                });
                local.insert((i, j), id);
            }
        }
        for i in 0..n {
            for j in 0..n - i {
                faces.push([local[&(i, j)], local[&(i + 1, j)], local[&(i, j + 1)]]);
                if i + j + 1 < n {
                    faces.push([local[&(i + 1, j)], local[&(i + 1, j + 1)], local[&(i, j + 1)]]);
                }
            }
        }
    }
    (vertices, faces)
}

/// Doubly periodic `nx x ny` grid; `embed` receives chart coordinates in `[0, 1)`.
pub fn periodic_grid(
    nx: usize,
    ny: usize,
    embed: impl Fn(f64, f64) -> Vector3<f64>,
) -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    let id = |i: usize, j: usize| (i % nx) * ny + (j % ny);
    let mut vertices = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            vertices.push(embed(i as f64 / nx as f64, j as f64 / ny as f64));
        }
    }
    let mut faces = Vec::with_capacity(2 * nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    (vertices, faces)
}

/// Open `nx x ny` grid over `[0, 1]^2` (with boundary).
pub fn open_grid(
    nx: usize,
    ny: usize,
    embed: impl Fn(f64, f64) -> Vector3<f64>,
) -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    let id = |i: usize, j: usize| i * (ny + 1) + j;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for i in 0..=nx {
        for j in 0..=ny {
            vertices.push(embed(i as f64 / nx as f64, j as f64 / ny as f64));
        }
    }
    let mut faces = Vec::with_capacity(2 * nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    (vertices, faces)
}

/// Vertex count of a ring of circumference `length` at target spacing `h`.
fn ring_count(length: f64, h: f64) -> usize {
    ((length / h).ceil() as usize).max(6)
}

/// Triangulates the band between ring `a` and ring `b`; both are listed by
/// increasing angle in `[0, 1)`. Triangles are `(a_i, b_j, a_i+1)` and
/// `(a_i, b_j, b_j+1)`.
pub fn zip_rings(a: &[usize], ta: &[f64], b: &[usize], tb: &[f64], faces: &mut Vec<[usize; 3]>) {
    let (na, nb) = (a.len(), b.len());
    let next = |t: &[f64], k: usize| {
        let n = t.len();
        if k + 1 >= n {
            t[(k + 1) % n] + 1.0
        } else {
            t[k + 1]
        }
    };
    let (mut i, mut j) = (0, 0);
    while i < na || j < nb {
        let advance_a = j == nb || (i < na && next(ta, i) <= next(tb, j));
        if advance_a {
            faces.push([a[i % na], b[j % nb], a[(i + 1) % na]]);
            i += 1;
        } else {
            faces.push([a[i % na], b[j % nb], b[(j + 1) % nb]]);
            j += 1;
        }
    }
}

/// Surface of revolution through rings at chart heights `s`; `embed(s, t)` places vertices.
/// `rings` holds `(s, circumference)` ordered from `s = 0` to `s = 1`; poles sit at the ends.
fn revolution_with_poles(
    rings: &[(f64, f64)],
    h: f64,
    embed: impl Fn(f64, f64) -> Vector3<f64>,
    top: Vector3<f64>,
    bottom: Vector3<f64>,
) -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    let mut vertices = vec![top];
    let mut faces = Vec::new();
    let mut prev: Option<(Vec<usize>, Vec<f64>)> = None;
    for (k, &(s, circ)) in rings.iter().enumerate() {
        let n = ring_count(circ, h);
        let offset = if k % 2 == 0 { 0.0 } else { 0.5 };
        let ts: Vec<f64> = (0..n).map(|j| (j as f64 + offset) / n as f64).collect();
        let ids: Vec<usize> = ts
            .iter()
            .map(|&t| {
                vertices.push(embed(s, t));
                vertices.len() - 1
            })
            .collect();
        match &prev {
            None => {
                for j in 0..n {
                    faces.push([0, ids[j], ids[(j + 1) % n]]);
                }
            }
            Some((pids, pts)) => zip_rings(pids, pts, &ids, &ts, &mut faces),
        }
        prev = Some((ids, ts));
    }
    vertices.push(bottom);
    let q = vertices.len() - 1;
    if let Some((ids, _)) = prev {
        let n = ids.len();
        for j in 0..n {
            faces.push([q, ids[(j + 1) % n], ids[j]]);
        }
    }
    (vertices, faces)
}

fn dumbbell_rings(surface: &CatalogSurface, resolution: usize) -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    let prof = surface.dumbbell_profile().expect("dumbbell");
    let h = PI / resolution as f64;
    // Arc length table along the upper half, in q.
    let samples = 30_000;
    let mut arc = vec![0.0; samples + 1];
    let speed = |q: f64| prof.jet(q).speed() * prof.local_rate(q);
    for i in 1..=samples {
        let (q0, q1) = (
            3.0 * (i - 1) as f64 / samples as f64,
            3.0 * i as f64 / samples as f64,
        );
        arc[i] = arc[i - 1] + 0.5 * (q1 - q0) * (speed(q0) + speed(q1));
    }
    let total = arc[samples];
    let m = (total / h).ceil() as usize;
    let q_at = |target: f64| {
        let k = arc.partition_point(|&a| a < target).clamp(1, samples);
        let frac = (target - arc[k - 1]) / (arc[k] - arc[k - 1]);
        3.0 * ((k - 1) as f64 + frac) / samples as f64
    };
    let mut rings = Vec::new();
    for k in 1..=m {
        let q = if k == m {
            3.0
        } else {
            q_at(total * k as f64 / m as f64)
        };
        rings.push(q / 6.0);
    }
    for k in (1..m).rev() {
        rings.push(1.0 - rings[k - 1]);
    }
    let rings: Vec<(f64, f64)> = rings
        .into_iter()
        .map(|s| (s, 2.0 * PI * prof.point(s).0))
        .collect();
    let zt = prof.half_height();
    revolution_with_poles(
        &rings,
        h,
        |s, t| surface.embed(s, t),
        Vector3::new(0.0, 0.0, zt),
        Vector3::new(0.0, 0.0, -zt),
    )
}

/// Polar mesh over concentric rings of the given radii, placed by `embed(radius, angle)`.
///
/// With `center` a single vertex at radius 0 is fanned to the first ring and the
/// result is a disc; otherwise it is an annulus whose loops are the first and last ring.
/// Returns vertices, faces and the vertex ids of each ring.
pub fn polar_mesh(
    radii: &[f64],
    h: f64,
    center: bool,
    embed: impl Fn(f64, f64) -> Vector3<f64>,
) -> (Vec<Vector3<f64>>, Vec<[usize; 3]>, Vec<Vec<usize>>) {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut ring_ids = Vec::new();
    if center {
        vertices.push(embed(0.0, 0.0));
    }
    let mut prev: Option<(Vec<usize>, Vec<f64>)> = None;
    for (k, &r) in radii.iter().enumerate() {
        let n = ring_count(2.0 * PI * r, h);
        let offset = if k % 2 == 0 { 0.0 } else { 0.5 };
        let ts: Vec<f64> = (0..n).map(|j| (j as f64 + offset) / n as f64).collect();
        let ids: Vec<usize> = ts
            .iter()
            .map(|&t| {
                vertices.push(embed(r, 2.0 * PI * t));
                vertices.len() - 1
            })
            .collect();
        match &prev {
            None if center => {
                for j in 0..n {
                    faces.push([0, ids[j], ids[(j + 1) % n]]);
                }
            }
            None => {}
            Some((pids, pts)) => zip_rings(pids, pts, &ids, &ts, &mut faces),
        }
        ring_ids.push(ids.clone());
        prev = Some((ids, ts));
    }
    (vertices, faces, ring_ids)
}

/// Flat disc of the given radius in the plane `z = 0`.
pub fn flat_disc(radius: f64, rings: usize, ambient: AmbientSpace) -> Result<TriMesh> {
    let radii: Vec<f64> = (1..=rings).map(|k| radius * k as f64 / rings as f64).collect();
    let (v, f, _) = polar_mesh(&radii, radius / rings as f64, true, |r, a| {
        Vector3::new(r * a.cos(), r * a.sin(), 0.0)
    });
    TriMesh::new(v, f, ambient, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_counts() {
        let (v, f) = icosphere(4);
        assert_eq!(v.len(), 10 * 16 + 2);
        assert_eq!(f.len(), 20 * 16);
    }

    #[test]
    fn sphere_and_torus_topology() {
        let s = build_surface(&CatalogSurface::unit_sphere(), 8).unwrap();
        assert_eq!(s.mesh.euler_characteristic(), 2);
        let t = build_surface(&CatalogSurface::flat_torus([1.0, 1.0, 1.0]).unwrap(), 8).unwrap();
        assert_eq!(t.mesh.euler_characteristic(), 0);
        assert_eq!(t.mesh.genus(), 1);
    }

    #[test]
    fn vertices_lie_on_the_surface() {
        let e = AmbientSpace::euclidean(3).unwrap();
        let el = CatalogSurface::new(
            Family::Ellipsoid {
                a: 1.0,
                b: 0.8,
                c: 0.5,
            },
            e.clone(),
        )
        .unwrap();
        let tor = CatalogSurface::new(
            Family::TorusOfRevolution {
                major: 2.0,
                minor: 0.5,
            },
            e,
        )
        .unwrap();
        for surf in [el, tor] {
            let b = build_surface(&surf, 12).unwrap();
            for p in &b.mesh.vertices {
                assert!(surf.implicit(p).unwrap().value.abs() < 1e-12);
            }
        }
        let d = CatalogSurface::dumbbell(0.1).unwrap();
        let b = build_surface(&d, 16).unwrap();
        for (p, &(s, t)) in b.mesh.vertices.iter().zip(&b.chart) {
            assert!((d.embed(s, t) - p).norm() < 1e-9);
        }
    }

    #[test]
    fn small_resolution_rejected() {
        assert!(build_surface(&CatalogSurface::unit_sphere(), 2).is_err());
    }

    #[test]
    fn flat_disc_is_a_disc() {
        let m = flat_disc(0.1, 6, AmbientSpace::euclidean(3).unwrap()).unwrap();
        assert_eq!(m.euler_characteristic(), 1);
        assert_eq!(m.boundary_loops().len(), 1);
    }
}
