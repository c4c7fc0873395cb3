//! Reference discs for the lifting construction.

use std::f64::consts::PI;

use nalgebra::Vector3;

use super::{DiscImmersion, LiftTarget};
use crate::ambient::AmbientSpace;
use crate::error::Result;
use crate::surface::build::{open_grid, polar_mesh};
use crate::surface::TriMesh;

/// Where the base vertex of a polar disc sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasePlacement {
    Centre,
    Boundary,
}

fn polar_disc(
    radius: f64,
    rings: usize,
    base: BasePlacement,
    embed: impl Fn(f64, f64) -> Vector3<f64>,
) -> Result<(TriMesh, usize)> {
    let radii: Vec<f64> = (1..=rings).map(|k| radius * k as f64 / rings as f64).collect();
    let (v, f, ring_ids) = polar_mesh(&radii, radius / rings as f64, true, embed);
    let base = match base {
        BasePlacement::Centre => 0,
        BasePlacement::Boundary => ring_ids[rings - 1][0],
    };
    Ok((TriMesh::new(v, f, AmbientSpace::euclidean(3)?, true)?, base))
}

/// Round disc of the given radius in the plane.
pub fn flat_disc(radius: f64, rings: usize, eps: Option<f64>) -> Result<DiscImmersion> {
    let (mesh, base) = polar_disc(radius, rings, BasePlacement::Centre, |r, a| {
        Vector3::new(r * a.cos(), r * a.sin(), 0.0)
    })?;
    let image = mesh.vertices.clone();
    DiscImmersion::new(mesh, image, LiftTarget::Plane, eps, base)
}

/// Star-shaped planar disc `r <= size (1 + waist cos 2a)` with two lobes along the x axis.
pub fn peanut(size: f64, waist: f64, rings: usize, eps: Option<f64>) -> Result<DiscImmersion> {
    let (mesh, base) = polar_disc(1.0, rings, BasePlacement::Centre, |r, a| {
        let s = size * r * (1.0 + waist * (2.0 * a).cos());
        Vector3::new(s * a.cos(), s * a.sin(), 0.0)
    })?;
    let image = mesh.vertices.clone();
    DiscImmersion::new(mesh, image, LiftTarget::Plane, eps, base)
}

/// Geodesic disc of radius `cap` about the north pole of the unit sphere.
pub fn sphere_cap(cap: f64, rings: usize, base: BasePlacement, eps: Option<f64>) -> Result<DiscImmersion> {
    let (mesh, base) = polar_disc(cap, rings, base, |r, a| {
        Vector3::new(r.sin() * a.cos(), r.sin() * a.sin(), r.cos())
    })?;
    let image = mesh.vertices.clone();
    DiscImmersion::new(mesh, image, LiftTarget::Sphere { radius: 1.0 }, eps, base)
}

/// Planar strip `[0, length] x [0, width]` wrapped onto the flat torus with the
/// given periods; it overlaps itself when `length` exceeds the first period.
pub fn torus_strip(
    periods: [f64; 2],
    length: f64,
    width: f64,
    cells: [usize; 2],
    eps: Option<f64>,
) -> Result<DiscImmersion> {
    let (v, f) = open_grid(cells[0], cells[1], |s, t| {
        Vector3::new(s * length, t * width, 0.0)
    });
    let mesh = TriMesh::new(v, f, AmbientSpace::euclidean(3)?, true)?;
    let image = mesh
        .vertices
        .iter()
        .map(|p| {
            Vector3::new(
                p[0].rem_euclid(periods[0]),
                (p[1] + 0.5 * periods[1]).rem_euclid(periods[1]),
                0.0,
            )
        })
        .collect();
    let base = (cells[0] / 2) * (cells[1] + 1) + cells[1] / 2;
    DiscImmersion::new(mesh, image, LiftTarget::FlatTorus { periods }, eps, base)
}

/// Great-circle distance on the unit sphere, the norm of the exact lift.
pub fn sphere_distance(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b)).clamp(0.0, PI)
}
