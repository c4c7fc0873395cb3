//! Annulus meshes with known or independently computable moduli.

use std::f64::consts::PI;

use nalgebra::Vector3;

use super::{AnnulusRegion, LoopSelector};
use crate::ambient::AmbientSpace;
use crate::error::Result;
use crate::surface::build::zip_rings;
use crate::surface::TriMesh;

fn euclid() -> AmbientSpace {
    AmbientSpace::euclidean(3).expect("dimension 3")
}

/// Rings of `n` vertices each, placed by `embed(k, angle)`, with alternating
/// half-step offsets. Loop 0 is ring 0 and loop 1 the last ring.
fn stacked_rings(
    rings: usize,
    n: usize,
    embed: impl Fn(usize, f64) -> Vector3<f64>,
) -> Result<AnnulusRegion> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut prev: Option<(Vec<usize>, Vec<f64>)> = None;
    let mut first = 0;
    for k in 0..rings {
        let offset = if k % 2 == 0 { 0.0 } else { 0.5 };
        let ts: Vec<f64> = (0..n).map(|j| (j as f64 + offset) / n as f64).collect();
        let ids: Vec<usize> = ts
            .iter()
            .map(|&t| {
                vertices.push(embed(k, 2.0 * PI * t));
                vertices.len() - 1
            })
            .collect();
        if k == 0 {
            first = ids[0];
        }
        if let Some((pids, pts)) = &prev {
            zip_rings(pids, pts, &ids, &ts, &mut faces);
        }
        prev = Some((ids, ts));
    }
    let last = vertices.len() - 1;
    let mesh = TriMesh::new(vertices, faces, euclid(), true)?;
    AnnulusRegion::new(mesh, LoopSelector::Vertex(first), LoopSelector::Vertex(last))
}

/// Right circular annulus of the given height and circumference, `resolution`
/// vertices around. The potential is 0 at the bottom and 1 at the top.
pub fn right_annulus(height: f64, circumference: f64, resolution: usize) -> Result<AnnulusRegion> {
    let radius = circumference / (2.0 * PI);
    let spacing = circumference / resolution as f64 * 3f64.sqrt() / 2.0;
    let rows = ((height / spacing).round() as usize).max(1);
    stacked_rings(rows + 1, resolution, |k, a| {
        Vector3::new(
            radius * a.cos(),
            radius * a.sin(),
            height * k as f64 / rows as f64,
        )
    })
}

/// Planar round annulus `inner <= |z| <= outer` with log-spaced rings, so
/// triangles are near-equilateral in the conformal cylinder coordinate.
/// The potential is 0 on the inner circle.
pub fn round_annulus(outer: f64, inner: f64, resolution: usize) -> Result<AnnulusRegion> {
    let log_ratio = (outer / inner).ln();
    let spacing = 2.0 * PI / resolution as f64 * 3f64.sqrt() / 2.0;
    let rows = ((log_ratio / spacing).round() as usize).max(1);
    stacked_rings(rows + 1, resolution, |k, a| {
        let r = inner * (log_ratio * k as f64 / rows as f64).exp();
        Vector3::new(r * a.cos(), r * a.sin(), 0.0)
    })
}

/// `[0,1]^2` minus the centred square of side `hole`, on an `n x n` grid;
/// `hole * n / 2` and `n / 2` must be integers. The potential is 0 outside.
pub fn square_annulus(n: usize, hole: f64) -> Result<AnnulusRegion> {
    let h = 1.0 / n as f64;
    let lo = ((1.0 - hole) / 2.0 * n as f64).round() as usize;
    let hi = n - lo;
    let id = |i: usize, j: usize| i * (n + 1) + j;
    let mut used = vec![false; (n + 1) * (n + 1)];
    let mut faces = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if (lo..hi).contains(&i) && (lo..hi).contains(&j) {
                continue;
            }
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            // Diagonals alternate by quadrant so the mesh is symmetric under reflection.
            if (i < n / 2) == (j < n / 2) {
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            } else {
                faces.push([a, b, d]);
                faces.push([b, c, d]);
            }
            for v in [a, b, c, d] {
                used[v] = true;
            }
        }
    }
    let mut new_id = vec![usize::MAX; used.len()];
    let mut vertices = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            if used[id(i, j)] {
                new_id[id(i, j)] = vertices.len();
                vertices.push(Vector3::new(i as f64 * h, j as f64 * h, 0.0));
            }
        }
    }
    let faces = faces.iter().map(|f| f.map(|v| new_id[v])).collect();
    let mesh = TriMesh::new(vertices, faces, euclid(), true)?;
    AnnulusRegion::new(
        mesh,
        LoopSelector::Vertex(new_id[id(0, 0)]),
        LoopSelector::Vertex(new_id[id(lo, lo)]),
    )
}

/// Annulus cut from `mesh` by a face subset; `b0` selects the zero-potential loop.
pub fn annulus_from_faces(
    mesh: &TriMesh,
    faces: &[usize],
    b0: LoopSelector,
    b1: LoopSelector,
) -> Result<AnnulusRegion> {
    let (sub, _) = mesh.submesh(faces)?;
    AnnulusRegion::new(sub, b0, b1)
}
