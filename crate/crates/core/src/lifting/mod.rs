//! Lifting immersed discs to a tangent plane through the exponential map.
//!
//! The disc is cut into small regions ("squares") ordered so that every prefix
//! meets the next region in a connected set and meets the boundary in a connected
//! arc. The lift is then extended one square at a time by local inverses of
//! `exp_x` anchored at an already lifted point.

pub mod domains;
pub mod lift;
pub mod order;
mod paths;

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::Serialize;

use crate::curvature::conjugate_radius_bound;
use crate::curvature::jacobi::tangent_direction;
use crate::error::{Error, Result};
use crate::surface::{CatalogSurface, Family, TriMesh};

pub use lift::{lift_disc, verify_lift, LiftChart, LiftReport};
pub use order::{order_squares, PrefixCertificate, Square, SquareOrder};

/// Surface with a closed-form exponential map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LiftTarget {
    /// The plane `z = 0` in euclidean space.
    Plane,
    /// Round sphere centred at the origin.
    Sphere { radius: f64 },
    /// The flat 2-torus `R^2 / (p0 Z x p1 Z)` in the `z = 0` slice of a flat 3-torus.
    FlatTorus { periods: [f64; 2] },
}

impl LiftTarget {
    pub fn from_surface(surface: &CatalogSurface) -> Result<Self> {
        match &surface.family {
            Family::RoundSphere { radius } => Ok(LiftTarget::Sphere { radius: *radius }),
            Family::FlatTorus2 => {
                let (p0, p1) = surface.flat_periods();
                Ok(LiftTarget::FlatTorus { periods: [p0, p1] })
            }
            _ => Err(Error::Unsupported(format!(
                "no closed-form exponential map on {}",
                surface.name()
            ))),
        }
    }

    pub fn curvature(&self) -> f64 {
        match self {
            LiftTarget::Sphere { radius } => 1.0 / (radius * radius),
            _ => 0.0,
        }
    }

    pub fn injectivity_radius(&self) -> f64 {
        match self {
            LiftTarget::Plane => f64::INFINITY,
            LiftTarget::Sphere { radius } => PI * radius,
            LiftTarget::FlatTorus { periods } => periods[0].min(periods[1]) / 2.0,
        }
    }

    /// Radius of the image ball on which the branch of `exp_x^-1` through a
    /// point with lift of norm `anchor_norm` is defined.
    pub fn invertibility_radius(&self, anchor_norm: f64) -> f64 {
        match self {
            LiftTarget::Plane => f64::INFINITY,
            LiftTarget::Sphere { radius } => PI * radius - anchor_norm,
            LiftTarget::FlatTorus { .. } => self.injectivity_radius(),
        }
    }

    /// Orthonormal tangent frame at `x`.
    pub fn frame(&self, x: &Vector3<f64>) -> [Vector3<f64>; 2] {
        match self {
            LiftTarget::Sphere { .. } => {
                let n = x.normalize();
                let e1 = tangent_direction(&n, 0.0);
                [e1, n.cross(&e1)]
            }
            _ => [Vector3::x(), Vector3::y()],
        }
    }

    /// `exp_x(w)` for `w` in frame coordinates.
    pub fn exp(&self, x: &Vector3<f64>, frame: &[Vector3<f64>; 2], w: [f64; 2]) -> Vector3<f64> {
        let v = frame[0] * w[0] + frame[1] * w[1];
        match self {
            LiftTarget::Plane => x + v,
            LiftTarget::Sphere { radius } => {
                let t = v.norm();
                let n = x / *radius;
                if t == 0.0 {
                    return *x;
                }
                (n * (t / radius).cos() + v / t * (t / radius).sin()) * *radius
            }
            LiftTarget::FlatTorus { periods } => {
                let mut p = x + v;
                for (i, per) in periods.iter().enumerate() {
                    p[i] = p[i].rem_euclid(*per);
                }
                p
            }
        }
    }

    /// Displacement from `a` to `b`, taking the minimal image on the torus.
    pub fn displacement(&self, a: &Vector3<f64>, b: &Vector3<f64>) -> Vector3<f64> {
        let mut d = b - a;
        if let LiftTarget::FlatTorus { periods } = self {
            for (i, per) in periods.iter().enumerate() {
                d[i] -= per * (d[i] / per).round();
            }
        }
        d
    }
}

/// Which hypotheses of the lifting construction the disc meets.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiscHypotheses {
    /// `length(boundary) <= eps`.
    pub boundary_ok: bool,
    /// Every vertex within `eps` of the boundary.
    pub depth_ok: bool,
    /// `eps < min{R, i0} / 10` with `R = pi / (3 sqrt K0)`.
    pub scale_ok: bool,
}

/// A triangulated disc with its immersion into a lift target.
#[derive(Debug, Clone, Serialize)]
pub struct DiscImmersion {
    /// Domain mesh; its edge lengths carry the pullback metric.
    #[serde(skip)]
    pub domain: TriMesh,
    /// Image of each domain vertex on the target.
    #[serde(skip)]
    pub image: Vec<Vector3<f64>>,
    pub target: LiftTarget,
    pub eps: f64,
    /// Vertex `y` whose image is the base point `x`.
    pub base: usize,
    pub boundary_length: f64,
    /// Largest edge-path distance from a vertex to the boundary.
    pub depth: f64,
    /// `min{R, i0} / 10`.
    pub scale_limit: f64,
    pub hypotheses: DiscHypotheses,
}

impl DiscImmersion {
    /// With `eps = None` the smallest admissible value `max{boundary length, depth}` is used.
    pub fn new(
        domain: TriMesh,
        image: Vec<Vector3<f64>>,
        target: LiftTarget,
        eps: Option<f64>,
        base: usize,
    ) -> Result<Self> {
        if domain.boundary_loops().len() != 1 || domain.euler_characteristic() != 1 {
            return Err(Error::Topology(format!(
                "a disc needs one boundary loop and chi = 1, got {} loops and chi = {}",
                domain.boundary_loops().len(),
                domain.euler_characteristic()
            )));
        }
        if image.len() != domain.num_vertices() {
            return Err(Error::Config(
                "one image point per domain vertex is required".into(),
            ));
        }
        if base >= domain.num_vertices() {
            return Err(Error::Config(format!("base vertex {base} out of range")));
        }
        let boundary = &domain.boundary_loops()[0];
        let boundary_length: f64 = (0..boundary.len())
            .map(|i| {
                let (a, b) = (boundary[i], boundary[(i + 1) % boundary.len()]);
                domain.edge_length(domain.edge_id(a, b).expect("boundary edge"))
            })
            .sum();
        let depth = paths::edge_dijkstra(&domain, boundary, |_| true, f64::INFINITY)
            .dist
            .iter()
            .fold(0.0, |a: f64, &b| a.max(b));
        let eps = eps.unwrap_or(boundary_length.max(depth));
        if !(eps > 0.0) {
            return Err(Error::Config(format!("eps must be positive, got {eps}")));
        }
        let scale_limit = conjugate_radius_bound(target.curvature())
            .radius
            .min(target.injectivity_radius())
            / 10.0;
        Ok(DiscImmersion {
            hypotheses: DiscHypotheses {
                boundary_ok: boundary_length <= eps,
                depth_ok: depth <= eps,
                scale_ok: eps < scale_limit,
            },
            domain,
            image,
            target,
            eps,
            base,
            boundary_length,
            depth,
            scale_limit,
        })
    }
}
