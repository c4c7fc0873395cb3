//! Per-vertex curvature estimates on triangle meshes.
//!
//! Gaussian curvature is the angle defect over the mixed Voronoi area, so its
//! area-weighted sum is exactly `2 pi chi` on a closed mesh. Mean curvature is
//! read off a quadratic height fit over the 2-ring in a local normal frame.

use nalgebra::{SMatrix, SVector, Vector3};
use serde::Serialize;

use crate::ambient::AmbientSpace;
use crate::error::Result;
use crate::surface::{build_surface, CatalogSurface, TriMesh};

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureField {
    /// `|H|` with the trace convention; `NaN` where not estimated.
    pub mean: Vec<f64>,
    /// Angle defect over mixed Voronoi area; `NaN` on boundary vertices.
    pub gaussian: Vec<f64>,
    pub angle_defect: Vec<f64>,
    pub interior: Vec<bool>,
    /// Largest distance from a vertex to a point of its fitting stencil.
    pub stencil_radius: f64,
}

impl CurvatureField {
    pub fn max_gaussian(&self) -> f64 {
        self.gaussian
            .iter()
            .copied()
            .filter(|k| k.is_finite())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_mean(&self) -> f64 {
        self.mean
            .iter()
            .copied()
            .filter(|h| h.is_finite())
            .fold(0.0, f64::max)
    }

    /// Sum of angle defects over interior vertices.
    pub fn total_defect(&self) -> f64 {
        self.angle_defect
            .iter()
            .zip(&self.interior)
            .filter(|(_, &i)| i)
            .map(|(d, _)| d)
            .sum()
    }
}

/// Vertex normal from area-weighted incident face normals.
pub fn vertex_normal(mesh: &TriMesh, v: usize) -> Vector3<f64> {
    mesh.vertex_faces(v)
        .iter()
        .fold(Vector3::zeros(), |acc, &f| acc + mesh.face_normal(f))
        .normalize()
}

fn two_ring(mesh: &TriMesh, v: usize) -> Vec<usize> {
    let mut ring: Vec<usize> = mesh.neighbors(v).to_vec();
    for &n in mesh.neighbors(v) {
        ring.extend_from_slice(mesh.neighbors(n));
    }
    ring.sort_unstable();
    ring.dedup();
    ring.retain(|&w| w != v);
    ring
}

/// Trace mean curvature from a least-squares fit of
/// `h = a x + b y + (c x^2 + 2 d x y + e y^2) / 2` over the 2-ring.
fn fitted_mean_curvature(mesh: &TriMesh, v: usize) -> (f64, f64) {
    let n = vertex_normal(mesh, v);
    let helper = if n.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let e1 = (helper - n * n.dot(&helper)).normalize();
    let e2 = n.cross(&e1);
    let mut normal_matrix = SMatrix::<f64, 5, 5>::zeros();
    let mut rhs = SVector::<f64, 5>::zeros();
    let mut radius: f64 = 0.0;
    let p = mesh.vertices[v];
    for w in two_ring(mesh, v) {
        let d = mesh.ambient.displacement(&p, &mesh.vertices[w]);
        radius = radius.max(d.norm());
        let (x, y, h) = (d.dot(&e1), d.dot(&e2), d.dot(&n));
        let row = SVector::<f64, 5>::new(x, y, 0.5 * x * x, x * y, 0.5 * y * y);
        normal_matrix += row * row.transpose();
        rhs += row * h;
    }
    let Some(sol) = normal_matrix.cholesky().map(|c| c.solve(&rhs)) else {
        return (f64::NAN, radius);
    };
    let (a, b, c, d, e) = (sol[0], sol[1], sol[2], sol[3], sol[4]);
    let g = 1.0 + a * a + b * b;
    let h = ((1.0 + b * b) * c - 2.0 * a * b * d + (1.0 + a * a) * e) / g.powf(1.5);
    (h.abs(), radius)
}

pub fn estimate_curvatures(mesh: &TriMesh) -> CurvatureField {
    let defects = mesh.angle_defects();
    let areas = mesh.mixed_voronoi_areas();
    let nv = mesh.num_vertices();
    let interior: Vec<bool> = (0..nv).map(|v| !mesh.is_boundary_vertex(v)).collect();
    let mut mean = vec![f64::NAN; nv];
    let mut gaussian = vec![f64::NAN; nv];
    let mut stencil_radius: f64 = 0.0;
    for v in 0..nv {
        if !interior[v] {
            continue;
        }
        gaussian[v] = defects[v] / areas[v];
        let (h, r) = fitted_mean_curvature(mesh, v);
        mean[v] = h;
        stencil_radius = stencil_radius.max(r);
    }
    CurvatureField {
        mean,
        gaussian,
        angle_defect: defects,
        interior,
        stencil_radius,
    }
}

/// `K0 = K_M + (n - 2) H0^2 / 4`.
pub fn curvature_bound(h0: f64, ambient: &AmbientSpace) -> f64 {
    ambient.constants().curvature_bound + (ambient.dim as f64 - 2.0) * h0 * h0 / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConjugateRadius {
    pub radius: f64,
    /// Set when `K0 <= 0`, in which case the radius is infinite.
    pub unbounded: bool,
}

/// `R = pi / (3 sqrt(K0))`, infinite for `K0 <= 0`.
pub fn conjugate_radius_bound(k0: f64) -> ConjugateRadius {
    if k0 <= 0.0 {
        ConjugateRadius {
            radius: f64::INFINITY,
            unbounded: true,
        }
    } else {
        ConjugateRadius {
            radius: std::f64::consts::PI / (3.0 * k0.sqrt()),
            unbounded: false,
        }
    }
}

/// Default discretization tolerance on the mesh-level bound: 5% of `K0 + 1`.
pub fn default_bound_tolerance(k0: f64) -> f64 {
    0.05 * (k0 + 1.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureVerification {
    pub surface: String,
    pub resolution: usize,
    pub h0: f64,
    pub k0: f64,
    pub tolerance: f64,
    pub max_k: f64,
    pub max_h: f64,
    /// Analytic supremum of `|H|` on the catalog surface.
    pub analytic_max_h: f64,
    /// `analytic_max_h <= h0`: the bound's hypothesis holds.
    pub hypothesis_ok: bool,
    pub total_defect: f64,
    pub euler_characteristic: i64,
    pub pass: bool,
}

/// Meshes `surface`, estimates curvatures and checks `max K <= K0 + tolerance`.
pub fn verify_curvature(
    surface: &CatalogSurface,
    resolution: usize,
    h0: f64,
    tolerance_scale: f64,
) -> Result<CurvatureVerification> {
    let built = build_surface(surface, resolution)?;
    let field = estimate_curvatures(&built.mesh);
    let k0 = curvature_bound(h0, &surface.ambient);
    let tolerance = default_bound_tolerance(k0) * tolerance_scale;
    let max_k = field.max_gaussian();
    let analytic_max_h = surface.max_mean_curvature();
    Ok(CurvatureVerification {
        surface: surface.name(),
        resolution,
        h0,
        k0,
        tolerance,
        max_k,
        max_h: field.max_mean(),
        analytic_max_h,
        hypothesis_ok: analytic_max_h <= h0 * (1.0 + 1e-9),
        total_defect: field.total_defect(),
        euler_characteristic: built.mesh.euler_characteristic(),
        pass: max_k <= k0 + tolerance,
    })
}
