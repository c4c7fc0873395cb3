use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::Serialize;

use crate::ambient::AmbientSpace;
use crate::curvature::estimate_curvatures;
use crate::error::{Error, Result};
use crate::surface::TriMesh;

/// `v0 = (pi / 2) min{1, i0^2 / pi^2}`.
pub fn v0(ambient: &AmbientSpace) -> f64 {
    let i0 = ambient.constants().injectivity_radius;
    if i0 >= PI {
        PI / 2.0
    } else {
        // Same real number as (pi/2)(i0^2/pi^2), rounded once.
        i0 * i0 / (2.0 * PI)
    }
}

/// Area, boundary length and total `|H|` of a region.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RegionMeasure {
    pub area: f64,
    pub boundary_length: f64,
    pub mean_curvature_integral: f64,
}

impl RegionMeasure {
    fn boundary_length(mesh: &TriMesh) -> f64 {
        mesh.boundary_loops()
            .iter()
            .flat_map(|l| (0..l.len()).map(move |i| (l[i], l[(i + 1) % l.len()])))
            .map(|(a, b)| {
                mesh.ambient
                    .displacement(&mesh.vertices[a], &mesh.vertices[b])
                    .norm()
            })
            .sum()
    }

    /// Measures a mesh region, integrating a known `|H|` at face centroids.
    pub fn from_mesh_with(mesh: &TriMesh, mean_curvature: impl Fn(&Vector3<f64>) -> f64) -> Self {
        let integral = (0..mesh.num_faces())
            .map(|f| {
                let p = mesh.face_points(f);
                mesh.face_area(f) * mean_curvature(&((p[0] + p[1] + p[2]) / 3.0))
            })
            .sum();
        RegionMeasure {
            area: mesh.surface_area(),
            boundary_length: Self::boundary_length(mesh),
            mean_curvature_integral: integral,
        }
    }

    /// Measures a mesh region with `|H|` estimated from the mesh itself. Faces
    /// average their interior corners; faces with none take the interior mean.
    pub fn from_mesh_estimated(mesh: &TriMesh) -> Self {
        let field = estimate_curvatures(mesh);
        let finite: Vec<f64> = field.mean.iter().copied().filter(|h| h.is_finite()).collect();
        let fallback = if finite.is_empty() {
            0.0
        } else {
            finite.iter().sum::<f64>() / finite.len() as f64
        };
        let integral = (0..mesh.num_faces())
            .map(|f| {
                let corners: Vec<f64> = mesh.faces[f]
                    .iter()
                    .map(|&v| field.mean[v])
                    .filter(|h| h.is_finite())
                    .collect();
                let h = if corners.is_empty() {
                    fallback
                } else {
                    corners.iter().sum::<f64>() / corners.len() as f64
                };
                mesh.face_area(f) * h
            })
            .sum();
        RegionMeasure {
            area: mesh.surface_area(),
            boundary_length: Self::boundary_length(mesh),
            mean_curvature_integral: integral,
        }
    }

    /// Flat disc of the given radius in closed form.
    pub fn flat_disc(radius: f64) -> Self {
        RegionMeasure {
            area: PI * radius * radius,
            boundary_length: 2.0 * PI * radius,
            mean_curvature_integral: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsoperimetricBranch {
    /// `sqrt(A) <= beta (L + int |H|)`.
    Inequality,
    /// `A >= v0`.
    LargeArea,
    Both,
    Neither,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsoperimetricRecord {
    pub area: f64,
    pub boundary_length: f64,
    pub mean_curvature_integral: f64,
    pub beta: f64,
    /// `sqrt(A) / (L + int |H|)`; `None` when the denominator vanishes.
    pub beta_empirical: Option<f64>,
    pub v0: f64,
    pub branch: IsoperimetricBranch,
    pub pass: bool,
}

/// Evaluates the isoperimetric alternative on a measured region.
pub fn isoperimetric_check(region: &RegionMeasure, beta: f64, v0: f64) -> Result<IsoperimetricRecord> {
    if !(beta > 0.0) {
        return Err(Error::Config(format!("beta must be positive, got {beta}")));
    }
    let denominator = region.boundary_length + region.mean_curvature_integral;
    let large = region.area >= v0;
    if region.boundary_length == 0.0 && !large {
        return Err(Error::Inapplicable(format!(
            "closed region of area {} below v0 = {v0}",
            region.area
        )));
    }
    let inequality = region.area.sqrt() <= beta * denominator;
    let branch = match (inequality, large) {
        (true, true) => IsoperimetricBranch::Both,
        (true, false) => IsoperimetricBranch::Inequality,
        (false, true) => IsoperimetricBranch::LargeArea,
        (false, false) => IsoperimetricBranch::Neither,
    };
    Ok(IsoperimetricRecord {
        area: region.area,
        boundary_length: region.boundary_length,
        mean_curvature_integral: region.mean_curvature_integral,
        beta,
        beta_empirical: (denominator > 0.0).then(|| region.area.sqrt() / denominator),
        v0,
        branch,
        pass: inequality || large,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn v0_values() {
        let t = AmbientSpace::flat_torus(vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(v0(&t), 1.0 / (8.0 * PI));
        let s = AmbientSpace::round_sphere(3, 1.0).unwrap();
        assert_eq!(v0(&s), PI / 2.0);
    }

    #[test]
    fn closed_small_region_is_inapplicable() {
        let r = RegionMeasure {
            area: 0.01,
            boundary_length: 0.0,
            mean_curvature_integral: 0.5,
        };
        assert!(matches!(
            isoperimetric_check(&r, 10.0, 0.04),
            Err(Error::Inapplicable(_))
        ));
        let big = RegionMeasure { area: 1.0, ..r };
        assert_eq!(
            isoperimetric_check(&big, 10.0, 0.04).unwrap().branch,
            IsoperimetricBranch::Both
        );
    }
}
